#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "graphforms/rational.hpp"
#include "graphforms/simd/kernels.hpp"

namespace graphforms {

/// Power product a_1^{e_1} ... a_n^{e_n}. Variables are 1-based.
class Monomial {
 public:
  static constexpr int kMaxVariables = static_cast<int>(simd::kExponentWidth);

  Monomial() = default;
  static Monomial variable(int index, unsigned power = 1);

  [[nodiscard]] unsigned exponent(int index) const;
  void set_exponent(int index, unsigned power);
  [[nodiscard]] unsigned degree() const { return degree_; }
  [[nodiscard]] bool is_one() const { return degree_ == 0; }
  /// Highest variable index with a non-zero exponent; 0 for the unit monomial.
  [[nodiscard]] int max_variable() const;
  [[nodiscard]] const std::uint8_t* data() const { return exps_.data(); }

  friend Monomial operator*(const Monomial& lhs, const Monomial& rhs);
  /// this / divisor, or nullopt when divisor does not divide this.
  [[nodiscard]] std::optional<Monomial> divided_by(const Monomial& divisor) const;

  friend bool operator==(const Monomial& lhs, const Monomial& rhs) {
    return lhs.exps_ == rhs.exps_;
  }
  /// Graded lexicographic order with a_1 > a_2 > ...
  friend std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs);

 private:
  alignas(32) std::array<std::uint8_t, simd::kExponentWidth> exps_{};
  std::uint16_t degree_ = 0;
};

/// Multivariate polynomial in the Schwinger variables a_1..a_n with exact
/// rational coefficients. Terms are kept sorted in descending graded-lex
/// order with no zero coefficients, so structural equality is value equality.
class MultiPoly {
 public:
  using Term = std::pair<Monomial, Rational>;

  MultiPoly() = default;
  MultiPoly(Rational constant);        // NOLINT(implicit)
  MultiPoly(std::int64_t constant)     // NOLINT(implicit)
      : MultiPoly(Rational(constant)) {}
  MultiPoly(int constant)              // NOLINT(implicit)
      : MultiPoly(Rational(constant)) {}

  static MultiPoly variable(int index);
  static MultiPoly monomial(const Monomial& m, Rational coefficient = Rational(1));
  /// Accepts unsorted terms with repeats and zeros.
  static MultiPoly from_terms(std::vector<Term> terms);

  [[nodiscard]] const std::vector<Term>& terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const;
  /// Coefficient of the unit monomial.
  [[nodiscard]] Rational constant_term() const;
  [[nodiscard]] Rational coefficient(const Monomial& m) const;
  [[nodiscard]] const Term& leading_term() const { return terms_.front(); }
  /// -1 for the zero polynomial.
  [[nodiscard]] int total_degree() const;
  /// Degree when every term has the same degree; nullopt otherwise. Zero is homogeneous of degree 0.
  [[nodiscard]] std::optional<int> homogeneous_degree() const;
  [[nodiscard]] int max_variable() const;
  [[nodiscard]] unsigned degree_in(int index) const;

  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& rhs);
  MultiPoly& operator-=(const MultiPoly& rhs);
  MultiPoly& operator*=(const MultiPoly& rhs);
  /// Multiply every coefficient by `factor`.
  MultiPoly& scale(const Rational& factor);

  friend MultiPoly operator+(MultiPoly lhs, const MultiPoly& rhs) { return lhs += rhs; }
  friend MultiPoly operator-(MultiPoly lhs, const MultiPoly& rhs) { return lhs -= rhs; }
  friend MultiPoly operator*(const MultiPoly& lhs, const MultiPoly& rhs);
  friend bool operator==(const MultiPoly&, const MultiPoly&) = default;

  [[nodiscard]] MultiPoly pow(unsigned exponent) const;
  [[nodiscard]] MultiPoly partial_derivative(int index) const;
  /// Replace a_index by `value`.
  [[nodiscard]] MultiPoly substitute(int index, const MultiPoly& value) const;
  /// Replace every a_i (i = 1..images.size()) by images[i-1]. Variables beyond
  /// images.size() must not occur.
  [[nodiscard]] MultiPoly substitute_all(std::span<const MultiPoly> images) const;
  [[nodiscard]] Rational evaluate(std::span<const Rational> point) const;
  [[nodiscard]] double evaluate(std::span<const double> point) const;

  /// Positive rational c with (*this / c) integral and primitive; 1 for zero.
  [[nodiscard]] Rational content() const;

  /// Canonical text, e.g. "a1*a2 + a1*a3 - 1/2*a3^2 + 4".
  [[nodiscard]] std::string to_string() const;
  /// Inverse of to_string; also accepts extra whitespace and '+' prefixes.
  static MultiPoly parse(std::string_view text);

 private:
  std::vector<Term> terms_;
};

std::ostream& operator<<(std::ostream& os, const MultiPoly& p);

/// Exact quotient a / b. Throws std::domain_error when b does not divide a.
MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b);

/// Bareiss pivot preference: unit constants, then other constants, then the
/// shortest polynomials.
inline int pivot_cost(const MultiPoly& p) {
  if (p.is_constant()) {
    const Rational c = p.constant_term();
    return c == Rational(1) || c == Rational(-1) ? 0 : 1;
  }
  return 1 + static_cast<int>(p.size());
}

/// Coefficient / exponent arrays for batched floating evaluation.
struct DensePolynomial {
  std::size_t num_vars = 0;
  std::vector<double> coefficients;
  std::vector<std::uint8_t> exponents;

  [[nodiscard]] simd::DensePolynomialView view() const {
    return {num_vars, coefficients, exponents};
  }
};

DensePolynomial to_dense(const MultiPoly& p, std::size_t num_vars);

}  // namespace graphforms
