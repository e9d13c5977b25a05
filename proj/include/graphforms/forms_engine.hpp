#pragma once

// The topological form alpha_G and the Pfaffian form phi_G, each computed by
// independent routes, with the checks relating them.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphforms/form.hpp"
#include "graphforms/graph.hpp"
#include "graphforms/graph_polynomials.hpp"

namespace graphforms {

/// Largest loop number accepted by the permutation-sum routes (l! terms per tree).
inline constexpr int kMaxPermutationLoops = 6;

class LoopLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FormReport {
  std::string subject;
  std::string graph_fingerprint;
  int loop_number = 0;
  /// Cycle basis columns used for phi (empty for trees).
  IntMatrix basis;
  /// Spanning tree of the basis when it is a fundamental basis.
  std::optional<EdgeSet> tree;
  std::vector<std::pair<std::string, FormExpression>> forms;
  IdentityReport checks;
  /// Constant c * pi^p relating the two compared forms, when one was sought.
  std::optional<ScaleRatio> ratio;
  std::vector<std::string> notes;

  [[nodiscard]] bool all_passed() const { return checks.all_passed(); }
  [[nodiscard]] const FormExpression* form(const std::string& name) const;
};

/// Sum over spanning trees of det(I[T]) times the pairing sum of edge Dodgson
/// polynomials over all orderings of the complement. Zero form for odd l.
/// Throws LoopLimitError above kMaxPermutationLoops.
FormExpression alpha_form(const Graph& g, DodgsonCache* cache = nullptr);

enum class PhiMethod { direct, dodgson_trees };

/// `direct`: Pf(dL adj(L) dL) / ((-2 pi)^{l/2} psi^{(l+1)/2}) with L the cycle
/// Laplacian. `dodgson_trees`: the spanning-tree sum with sign
/// (-1)^{sum of non-tree labels} det(C[non-tree rows]); subject to the same
/// loop cap as alpha_form. Zero form for odd l, +1 for trees.
FormExpression phi_form(const Graph& g, const CycleBasis& basis, PhiMethod method = PhiMethod::direct,
                        DodgsonCache* cache = nullptr);

/// Third route: sum over trees of det(C[non-tree rows]) haf(adj L_T) with L_T
/// the cycle Laplacian of the fundamental basis of T.
FormExpression phi_via_hafnian(const Graph& g, const CycleBasis& basis);

/// A path matrix built from a different spanning tree whose matrix differs
/// from `pathm`, if the graph has one.
std::optional<IntMatrix> alternative_path_matrix(const Graph& g, const IntMatrix& pathm);

/// det[C | P]. Throws std::domain_error unless it is +-1, and std::logic_error
/// if a second path matrix gives a different value.
int sign_factor(const Graph& g, const CycleBasis& basis, const IntMatrix& pathm);

/// alpha = det[C|P] / 2^l * phi, with phi from both routes and the hafnian
/// cross-check.
FormReport verify_main_theorem(const Graph& g, const CycleBasis& basis);

/// Fundamental basis of the last edge: column j is e_j - e_n.
CycleBasis dipole_basis(const Graph& dipole);

/// Closed form of phi for the dipole with 2i+1 edges.
FormExpression dipole_phi(int i);

/// Images of a_1..a_m under the subdivision of edge e: a_e -> a_e + a_{e+1},
/// later variables shift up by one.
std::vector<MultiPoly> subdivision_images(int num_edges, int e);

/// phi_{G'} = s^* phi_G, alpha_{G'} = (-1)^{e+1} s^* alpha_G and
/// det[C'|P'] = (-1)^{e+l+1} det[C|P] for G' = G with edge e subdivided.
FormReport subdivision_check(const Graph& g, const CycleBasis& basis, int e);
FormReport subdivision_check(const Graph& g, int e);

/// Closedness, phi ^ phi = 0, vanishing for odd l and self-loops, scaling
/// weight zero and the tree normalisation.
FormReport property_checks(const Graph& g, const CycleBasis& basis);

/// Coefficient of da_1 ^ ... ^ da_{2i} of the dipole form on the chart
/// a_{2i+1} = 1: prefactor * numerator / psi^{psi_half/2}.
struct ChartIntegrand {
  int dims = 0;
  double prefactor = 0;
  MultiPoly numerator;
  MultiPoly psi;
  int psi_half = 0;

  [[nodiscard]] double operator()(std::span<const double> point) const;
};

ChartIntegrand dipole_chart_integrand(int i);

enum class IntegrationScheme { quadrature, monte_carlo };

struct NumericBudget {
  /// Tolerance on the reported error estimate.
  double tolerance = 1e-6;
  /// Nested tanh-sinh refinement levels.
  std::size_t max_refinements = 15;
  std::uint64_t samples = 10'000'000;
  std::uint64_t seed = 0;
};

NumericBudget default_budget(IntegrationScheme scheme);

struct NumericResult {
  double estimate = 0;
  double error = 0;
  std::uint64_t evaluations = 0;
};

class BudgetExhausted : public std::runtime_error {
 public:
  BudgetExhausted(const std::string& what, NumericResult partial)
      : std::runtime_error(what), partial_(partial) {}
  [[nodiscard]] const NumericResult& partial() const { return partial_; }

 private:
  NumericResult partial_;
};

/// Integral of the dipole form over the positive orthant on the chart
/// a_{2i+1} = 1. Quadrature maps each axis by a = t / (1 - t); Monte Carlo
/// uses a = (u / (1 - u))^3, which keeps the variance finite. Throws
/// BudgetExhausted when the error estimate exceeds the tolerance.
NumericResult integrate_dipole_numeric(int i, IntegrationScheme scheme,
                                       const NumericBudget& budget);
NumericResult integrate_dipole_numeric(int i, IntegrationScheme scheme);

}  // namespace graphforms
