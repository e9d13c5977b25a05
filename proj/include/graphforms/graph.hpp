#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graphforms/matrix.hpp"

namespace graphforms {

/// Malformed graph description.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed description that violates a graph invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int tail = 0;
  int head = 0;

  [[nodiscard]] bool is_self_loop() const { return tail == head; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Sorted set of distinct edge labels.
class EdgeSet {
 public:
  EdgeSet() = default;
  EdgeSet(std::vector<int> labels);  // NOLINT(implicit)
  EdgeSet(std::initializer_list<int> labels) : EdgeSet(std::vector<int>(labels)) {}

  [[nodiscard]] const std::vector<int>& labels() const { return labels_; }
  [[nodiscard]] std::size_t size() const { return labels_.size(); }
  [[nodiscard]] bool empty() const { return labels_.empty(); }
  [[nodiscard]] bool contains(int label) const;
  [[nodiscard]] std::uint32_t mask() const;
  /// 0-based row indices, for use with minors.
  [[nodiscard]] std::vector<std::size_t> indices() const;
  /// {1..num_edges} minus this set.
  [[nodiscard]] EdgeSet complement(int num_edges) const;
  [[nodiscard]] int label_sum() const;

  /// "{1,3}"
  [[nodiscard]] std::string to_string() const;
  static EdgeSet parse(std::string_view text);

  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }
  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;
  friend auto operator<=>(const EdgeSet& a, const EdgeSet& b) { return a.labels_ <=> b.labels_; }

 private:
  std::vector<int> labels_;
};

/// Connected directed multigraph with labelled edges 1..m, vertices 1..n and
/// a distinguished vertex v_star (default n).
class Graph {
 public:
  Graph(int num_vertices, std::vector<Edge> edges, std::optional<int> v_star = std::nullopt);

  [[nodiscard]] int num_vertices() const { return num_vertices_; }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }
  [[nodiscard]] int loop_number() const { return num_edges() - num_vertices_ + 1; }
  [[nodiscard]] int v_star() const { return v_star_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  /// 1-based edge label.
  [[nodiscard]] const Edge& edge(int label) const;
  [[nodiscard]] bool has_self_loop() const;
  /// Position of vertex v among the vertices other than v_star (0-based), or
  /// nullopt for v_star itself.
  [[nodiscard]] std::optional<int> vertex_column(int v) const;
  /// Vertex at a given column position.
  [[nodiscard]] int column_vertex(int column) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int num_vertices_;
  std::vector<Edge> edges_;
  int v_star_;
};

/// Ordered cycle incidence vectors as the columns of an |E| x l matrix.
class CycleBasis {
 public:
  /// Validates that the columns are independent cycles of `g` (I^T C = 0).
  /// With `require_simple`, each column must also be a single simple cycle
  /// with entries in {-1, 0, 1}.
  static CycleBasis from_columns(const Graph& g, IntMatrix columns, bool require_simple = true);

  [[nodiscard]] const IntMatrix& matrix() const { return columns_; }
  [[nodiscard]] int size() const { return static_cast<int>(columns_.cols()); }
  [[nodiscard]] const std::optional<std::vector<int>>& defining_edges() const { return defining_; }
  [[nodiscard]] const std::optional<EdgeSet>& tree() const { return tree_; }

  /// Basis C * P for an integer matrix P with det P = +-1.
  [[nodiscard]] CycleBasis transformed(const Graph& g, const IntMatrix& p) const;

  friend bool operator==(const CycleBasis&, const CycleBasis&) = default;

 private:
  friend CycleBasis fundamental_cycle_basis(const Graph& g, const EdgeSet& tree);

  IntMatrix columns_;
  std::optional<std::vector<int>> defining_;
  std::optional<EdgeSet> tree_;
};

/// All spanning trees in lexicographic order.
std::vector<EdgeSet> spanning_trees(const Graph& g);
bool is_spanning_tree(const Graph& g, const EdgeSet& t);
/// Greedy spanning tree on edges taken in label order (lexicographically first).
EdgeSet default_tree(const Graph& g);

/// |E| x (|V|-1): -1 where an edge leaves a vertex, +1 where it enters.
IntMatrix incidence_matrix(const Graph& g);

/// Columns ordered by defining edge; each cycle oriented along its defining edge.
CycleBasis fundamental_cycle_basis(const Graph& g, const EdgeSet& tree);
CycleBasis default_cycle_basis(const Graph& g);

/// |E| x (|V|-1): column j is the signed edge vector of the tree path from
/// v_star to the j-th non-star vertex. Uses default_tree when none is given.
IntMatrix path_matrix(const Graph& g, const std::optional<EdgeSet>& tree = std::nullopt);

Graph contract_edge(const Graph& g, int e);
Graph delete_edge(const Graph& g, int e);
/// New vertex 1 (others shift up); e' = (tail+1 -> 1) keeps label e, e'' =
/// (1 -> head+1) takes label e+1, later labels shift up.
Graph subdivide_edge(const Graph& g, int e);
/// Induced basis on the subdivided graph: row e is duplicated into e, e+1.
CycleBasis subdivide_basis(const Graph& subdivided, const CycleBasis& basis, int e);

/// Two vertices and n parallel edges v1 -> v2.
Graph dipole_graph(int n);

/// Line format: "e <label> <tail> <head>" and "vstar <k>", '#' comments;
/// ';' also separates statements.
Graph parse_graph_text(std::string_view text);
/// Canonical text: edges in label order followed by the vstar line.
std::string to_text(const Graph& g);
/// {"edges": [[tail, head], ...], "v_star": k}
Graph parse_graph_json(std::string_view text);
std::string to_json_text(const Graph& g);
/// JSON when the first non-space character is '{', line format otherwise.
Graph parse_graph(std::string_view text);

/// 16 hex digits of FNV-1a over the canonical text.
std::string fingerprint(const Graph& g);

}  // namespace graphforms
