#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphforms/graph.hpp"
#include "graphforms/matrix.hpp"
#include "graphforms/polynomial.hpp"

namespace graphforms {

using PolyMatrix = RingMatrix<MultiPoly>;

PolyMatrix to_poly_matrix(const IntMatrix& m);

/// diag(a_1, ..., a_m)
PolyMatrix edge_variable_matrix(const Graph& g);
/// [[D, I], [-I^T, 0]]; rows and columns 1..|E| are edges, the rest are the
/// non-star vertices in label order.
PolyMatrix expanded_laplacian(const Graph& g);
/// 1-based row/column of vertex v in the expanded Laplacian.
int expanded_index_of_vertex(const Graph& g, int v);

/// Product of all edge variables.
MultiPoly edge_variable_product(const Graph& g);

enum class SymanzikMethod { trees, expanded_det, cycle_det };

/// Sum over spanning trees of the product of the variables not in the tree.
/// `cycle_det` uses the given basis (default basis when none).
MultiPoly symanzik(const Graph& g, SymanzikMethod method = SymanzikMethod::trees,
                   const CycleBasis* basis = nullptr);

enum class DodgsonMethod { det, expansion };

/// det M(A, B) with rows A and columns B of the expanded Laplacian removed.
/// Indices are 1-based expanded-Laplacian indices (vertices offset by |E|).
/// The expansion route only accepts edge indices.
MultiPoly dodgson(const Graph& g, std::span<const int> a, std::span<const int> b,
                  DodgsonMethod method = DodgsonMethod::det);

/// Thread-safe memo for the single-edge Dodgson polynomials psi^{i,j},
/// keyed by the unordered pair (they are symmetric in i, j).
class DodgsonCache {
 public:
  explicit DodgsonCache(const Graph& g) : graph_(g) {}
  MultiPoly get(int i, int j);
  [[nodiscard]] std::size_t size() const;

 private:
  const Graph& graph_;
  mutable std::mutex mutex_;
  std::map<std::pair<int, int>, MultiPoly> values_;
};

struct LaplacianBundle {
  PolyMatrix D;
  PolyMatrix I;
  PolyMatrix M;
  /// Vertex Laplacian I^T D^{-1} I multiplied through by the product of all
  /// edge variables, so that every entry is a polynomial.
  PolyMatrix L_cleared;
  MultiPoly L_scale;
  PolyMatrix Lambda;
};

LaplacianBundle laplacian_bundle(const Graph& g, const CycleBasis& basis);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct IdentityReport {
  std::vector<Check> checks;

  [[nodiscard]] bool all_passed() const;
  void add(std::string name, bool passed, std::string detail = {});
  void append(const IdentityReport& other);
};

/// Entries of the inverse vertex and cycle Laplacians as Dodgson
/// polynomials, the projector decomposition of D, the edge-entry and
/// contraction forms, and the fundamental-basis formula over every tree.
IdentityReport inverse_entries_via_dodgson(const Graph& g, const CycleBasis& basis,
                                           DodgsonCache* cache = nullptr);

/// Determinants of concatenated matrices [C | R], the spanning-tree count at
/// a = 1, the incidence/cycle minor sign relation over every (|V|-1)-subset,
/// and the two linear Dodgson relations.
IdentityReport concatenated_det_identities(const Graph& g, const CycleBasis& basis,
                                           const IntMatrix& pathm, DodgsonCache* cache = nullptr);

/// Substitution sending the variables of G/e (or G\e) to those of G.
std::vector<MultiPoly> relabel_after_removal(int num_edges_after, int removed);

}  // namespace graphforms
