#pragma once

// Differential forms in the edge variables a_1..a_n with polynomial
// coefficients, and the rational-function forms c * pi^p * N / psi^{k/2}
// in which the graph forms are expressed.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphforms/polynomial.hpp"
#include "graphforms/rational.hpp"

namespace graphforms {

/// Bit e-1 set <=> da_e is a factor. Supports up to 32 edge variables.
using EdgeMask = std::uint32_t;

/// Sorted edge labels of a mask.
std::vector<int> mask_labels(EdgeMask mask);
EdgeMask mask_of(std::span<const int> labels);

/// Orders wedge monomials da_S by |S|, then lexicographically on the sorted
/// label lists. This is the serialization order.
struct MaskOrder {
  bool operator()(EdgeMask lhs, EdgeMask rhs) const;
};

/// Sign of da_S ^ da_T relative to da_{S u T}; 0 when S and T overlap.
int wedge_sign(EdgeMask s, EdgeMask t);

/// Element of the exterior algebra over the polynomial ring: sum_S P_S da_S.
/// Multiplication is the wedge product, so the even part is a commutative
/// ring and may be used as matrix entries for determinants and Pfaffians.
class DiffForm {
 public:
  using TermMap = std::map<EdgeMask, MultiPoly, MaskOrder>;

  DiffForm() = default;
  DiffForm(MultiPoly function);     // NOLINT(implicit)
  DiffForm(int constant) : DiffForm(MultiPoly(constant)) {}  // NOLINT(implicit)

  static DiffForm term(EdgeMask mask, MultiPoly coefficient);
  /// da_e
  static DiffForm basis(int edge);
  /// dP = sum_e dP/da_e da_e
  static DiffForm differential(const MultiPoly& p);

  [[nodiscard]] const TermMap& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  /// Common |S| of all terms; nullopt for mixed degree. The zero form has degree 0.
  [[nodiscard]] std::optional<int> degree() const;
  [[nodiscard]] bool is_even() const;
  [[nodiscard]] MultiPoly coefficient(EdgeMask mask) const;

  DiffForm operator-() const;
  DiffForm& operator+=(const DiffForm& rhs);
  DiffForm& operator-=(const DiffForm& rhs);
  DiffForm& scale(const Rational& factor);
  DiffForm& multiply(const MultiPoly& function);

  friend DiffForm operator+(DiffForm lhs, const DiffForm& rhs) { return lhs += rhs; }
  friend DiffForm operator-(DiffForm lhs, const DiffForm& rhs) { return lhs -= rhs; }
  /// Wedge product.
  friend DiffForm operator*(const DiffForm& lhs, const DiffForm& rhs);
  friend bool operator==(const DiffForm&, const DiffForm&) = default;

  [[nodiscard]] DiffForm exterior_derivative() const;
  /// Pullback along a_i -> images[i-1]: coefficients are substituted and each
  /// da_i becomes d(images[i-1]).
  [[nodiscard]] DiffForm pullback(std::span<const MultiPoly> images) const;

  /// "(P) da{1,3} + (Q) da{2,3}"; "0" for the zero form.
  [[nodiscard]] std::string to_string() const;

 private:
  TermMap terms_;
};

bool is_commuting_element(const DiffForm& f);

/// Pivot cost for completeness; forms are never eliminated by Bareiss.
inline int pivot_cost(const DiffForm& f) { return f.is_zero() ? 1 : 1 + static_cast<int>(f.terms().size()); }

/// scalar * pi^pi_power * numerator / psi^(psi_half / 2).
///
/// `psi` is the ambient graph polynomial; two expressions can only be
/// combined when their ambient psi and variable counts agree. Values are kept
/// canonical: the positive rational content of the numerator is moved into
/// the scalar and the zero form has scalar 0, pi_power 0 and psi_half 0.
class FormExpression {
 public:
  FormExpression() = default;
  FormExpression(Rational scalar, int pi_power, int psi_half, MultiPoly psi, int num_vars,
                 DiffForm numerator);

  static FormExpression zero(MultiPoly psi, int num_vars);

  [[nodiscard]] const Rational& scalar() const { return scalar_; }
  [[nodiscard]] int pi_power() const { return pi_power_; }
  [[nodiscard]] int psi_half() const { return psi_half_; }
  [[nodiscard]] const MultiPoly& psi() const { return psi_; }
  [[nodiscard]] int num_vars() const { return num_vars_; }
  [[nodiscard]] const DiffForm& numerator() const { return numerator_; }
  [[nodiscard]] bool is_zero() const { return numerator_.is_zero(); }
  [[nodiscard]] std::optional<int> degree() const { return numerator_.degree(); }

  /// Twice the weight under a -> lambda a: 2 (deg P_S + |S|) - k deg psi,
  /// when it is the same for every term (0 means projective).
  [[nodiscard]] std::optional<int> doubled_weight() const;

  [[nodiscard]] FormExpression scaled(const Rational& factor, int extra_pi_power = 0) const;
  [[nodiscard]] FormExpression exterior_derivative() const;
  /// Pullback along a polynomial substitution into `target_vars` variables.
  [[nodiscard]] FormExpression pullback(std::span<const MultiPoly> images, int target_vars) const;

  friend FormExpression wedge(const FormExpression& lhs, const FormExpression& rhs);
  friend FormExpression operator+(const FormExpression& lhs, const FormExpression& rhs);

  /// Exact "(p/q) * pi^(n) * [ (P) da{..} + ... ] / psi^(k/2)"; "0" for zero.
  [[nodiscard]] std::string to_string() const;

 private:
  void canonicalize();

  Rational scalar_{0};
  int pi_power_ = 0;
  int psi_half_ = 0;
  MultiPoly psi_{1};
  int num_vars_ = 0;
  DiffForm numerator_;
};

FormExpression wedge(const FormExpression& lhs, const FormExpression& rhs);
/// Sum; both summands need equal pi powers and psi powers of equal parity.
FormExpression operator+(const FormExpression& lhs, const FormExpression& rhs);
std::ostream& operator<<(std::ostream& os, const FormExpression& f);

/// Throws std::invalid_argument when the ambient data differ.
void require_same_ambient(const FormExpression& lhs, const FormExpression& rhs);

/// Equality as rational-function forms, after cross-multiplying powers of psi.
bool forms_equal(const FormExpression& lhs, const FormExpression& rhs);

struct ScaleRatio {
  Rational factor;
  int pi_power = 0;

  friend bool operator==(const ScaleRatio&, const ScaleRatio&) = default;
  [[nodiscard]] std::string to_string() const;
};

/// The constant c * pi^p with lhs = c * pi^p * rhs, if any. Requires rhs != 0.
std::optional<ScaleRatio> scale_ratio(const FormExpression& lhs, const FormExpression& rhs);

}  // namespace graphforms
