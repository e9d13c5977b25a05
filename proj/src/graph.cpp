#include "graphforms/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>

#include "graphforms/rational.hpp"
#include "json.hpp"

namespace graphforms {
namespace {

/// Union-find with undo, for incremental acyclicity tests.
class RollbackUnionFind {
 public:
  explicit RollbackUnionFind(int n) : parent_(static_cast<std::size_t>(n + 1)), size_(parent_.size(), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) const {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    history_.push_back(b);
    return true;
  }

  void undo() {
    const int b = history_.back();
    history_.pop_back();
    const int a = parent_[static_cast<std::size_t>(b)];
    size_[static_cast<std::size_t>(a)] -= size_[static_cast<std::size_t>(b)];
    parent_[static_cast<std::size_t>(b)] = b;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
  std::vector<int> history_;
};

bool connected(int n, const std::vector<Edge>& edges) {
  RollbackUnionFind uf(n);
  int components = n;
  for (const auto& e : edges)
    if (uf.unite(e.tail, e.head)) --components;
  return components == 1;
}

struct Step {
  int label;
  int sign;  // +1 when traversed tail -> head
};

/// Path between two vertices inside a spanning tree.
std::vector<Step> tree_path(const Graph& g, const EdgeSet& tree, int from, int to) {
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<std::vector<int>> adj(n + 1);
  for (int e : tree) {
    const Edge& ed = g.edge(e);
    adj[static_cast<std::size_t>(ed.tail)].push_back(e);
    adj[static_cast<std::size_t>(ed.head)].push_back(e);
  }
  std::vector<int> via(n + 1, 0);
  std::vector<bool> seen(n + 1, false);
  std::deque<int> queue{from};
  seen[static_cast<std::size_t>(from)] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int e : adj[static_cast<std::size_t>(v)]) {
      const Edge& ed = g.edge(e);
      const int w = ed.tail == v ? ed.head : ed.tail;
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      via[static_cast<std::size_t>(w)] = e;
      queue.push_back(w);
    }
  }
  if (!seen[static_cast<std::size_t>(to)]) throw std::invalid_argument("edge set does not connect the graph");
  std::vector<Step> steps;
  for (int v = to; v != from;) {
    const int e = via[static_cast<std::size_t>(v)];
    const Edge& ed = g.edge(e);
    const bool forward = ed.head == v;
    steps.push_back({e, forward ? 1 : -1});
    v = forward ? ed.tail : ed.head;
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

void require_tree(const Graph& g, const EdgeSet& t) {
  if (!is_spanning_tree(g, t))
    throw std::invalid_argument("edge set " + t.to_string() + " is not a spanning tree");
}

void require_label(const Graph& g, int e) {
  if (e < 1 || e > g.num_edges())
    throw std::out_of_range("edge label " + std::to_string(e) + " out of range");
}

std::size_t rational_rank(const IntMatrix& m) {
  std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a[i][j] = Rational(m(i, j));
  std::size_t rank = 0;
  for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
    std::size_t p = rank;
    while (p < m.rows() && a[p][c].is_zero()) ++p;
    if (p == m.rows()) continue;
    std::swap(a[p], a[rank]);
    for (std::size_t i = rank + 1; i < m.rows(); ++i) {
      if (a[i][c].is_zero()) continue;
      const Rational f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < m.cols(); ++j) a[i][j] -= f * a[rank][j];
    }
    ++rank;
  }
  return rank;
}

bool is_simple_cycle(const Graph& g, const IntMatrix& c, std::size_t col) {
  std::vector<int> degree(static_cast<std::size_t>(g.num_vertices() + 1), 0);
  RollbackUnionFind uf(g.num_vertices());
  int touched_edges = 0;
  int first_vertex = 0;
  for (int e = 1; e <= g.num_edges(); ++e) {
    const auto x = c(static_cast<std::size_t>(e - 1), col);
    if (x == 0) continue;
    if (x != 1 && x != -1) return false;
    const Edge& ed = g.edge(e);
    degree[static_cast<std::size_t>(ed.tail)] += 1;
    degree[static_cast<std::size_t>(ed.head)] += 1;
    uf.unite(ed.tail, ed.head);
    first_vertex = ed.tail;
    ++touched_edges;
  }
  if (touched_edges == 0) return false;
  const int root = uf.find(first_vertex);
  for (int v = 1; v <= g.num_vertices(); ++v) {
    const int d = degree[static_cast<std::size_t>(v)];
    if (d != 0 && d != 2) return false;
    if (d != 0 && uf.find(v) != root) return false;
  }
  return true;
}

int parse_int(std::string_view token, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw ParseError("expected an integer " + std::string(what) + ", got '" + std::string(token) + "'");
  return value;
}

}  // namespace

// ---------------------------------------------------------------------------
// EdgeSet

EdgeSet::EdgeSet(std::vector<int> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  if (std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
    throw std::invalid_argument("duplicate label in edge set");
  if (!labels_.empty() && labels_.front() < 1) throw std::out_of_range("edge labels start at 1");
}

bool EdgeSet::contains(int label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

std::uint32_t EdgeSet::mask() const {
  std::uint32_t m = 0;
  for (int e : labels_) {
    if (e > 32) throw std::out_of_range("edge label beyond 32 in mask");
    m |= std::uint32_t{1} << (e - 1);
  }
  return m;
}

std::vector<std::size_t> EdgeSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(labels_.size());
  for (int e : labels_) out.push_back(static_cast<std::size_t>(e - 1));
  return out;
}

EdgeSet EdgeSet::complement(int num_edges) const {
  std::vector<int> out;
  for (int e = 1; e <= num_edges; ++e)
    if (!contains(e)) out.push_back(e);
  return EdgeSet(std::move(out));
}

int EdgeSet::label_sum() const { return std::accumulate(labels_.begin(), labels_.end(), 0); }

std::string EdgeSet::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(labels_[i]);
  }
  return s + '}';
}

EdgeSet EdgeSet::parse(std::string_view text) {
  std::vector<int> out;
  std::string cleaned;
  for (char ch : text) cleaned += (ch == '{' || ch == '}' || ch == ',') ? ' ' : ch;
  std::istringstream is(cleaned);
  std::string tok;
  while (is >> tok) out.push_back(parse_int(tok, "edge label"));
  return EdgeSet(std::move(out));
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(int num_vertices, std::vector<Edge> edges, std::optional<int> v_star)
    : num_vertices_(num_vertices), edges_(std::move(edges)), v_star_(v_star.value_or(num_vertices)) {
  if (num_vertices_ < 1) throw ValidationError("a graph needs at least one vertex");
  if (edges_.size() > 32) throw ValidationError("at most 32 edges are supported");
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.tail < 1 || e.tail > num_vertices_ || e.head < 1 || e.head > num_vertices_)
      throw ValidationError("edge " + std::to_string(i + 1) + ": vertex index out of range");
  }
  if (v_star_ < 1 || v_star_ > num_vertices_) throw ValidationError("v_star out of range");
  if (!connected(num_vertices_, edges_)) throw ValidationError("graph is not connected");
}

const Edge& Graph::edge(int label) const {
  if (label < 1 || label > num_edges())
    throw std::out_of_range("edge label " + std::to_string(label) + " out of range");
  return edges_[static_cast<std::size_t>(label - 1)];
}

bool Graph::has_self_loop() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_self_loop(); });
}

std::optional<int> Graph::vertex_column(int v) const {
  if (v < 1 || v > num_vertices_) throw std::out_of_range("vertex index out of range");
  if (v == v_star_) return std::nullopt;
  return v < v_star_ ? v - 1 : v - 2;
}

int Graph::column_vertex(int column) const {
  if (column < 0 || column >= num_vertices_ - 1) throw std::out_of_range("vertex column out of range");
  return column + 1 < v_star_ ? column + 1 : column + 2;
}

// ---------------------------------------------------------------------------
// Trees and matrices

std::vector<EdgeSet> spanning_trees(const Graph& g) {
  const int need = g.num_vertices() - 1;
  const int m = g.num_edges();
  std::vector<EdgeSet> out;
  RollbackUnionFind uf(g.num_vertices());
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(need));
  auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(chosen.size()) == need) {
      out.emplace_back(chosen);
      return;
    }
    for (int e = start; e <= m - (need - static_cast<int>(chosen.size())) + 1; ++e) {
      const Edge& ed = g.edge(e);
      if (!uf.unite(ed.tail, ed.head)) continue;
      chosen.push_back(e);
      self(self, e + 1);
      chosen.pop_back();
      uf.undo();
    }
  };
  rec(rec, 1);
  return out;
}

bool is_spanning_tree(const Graph& g, const EdgeSet& t) {
  if (static_cast<int>(t.size()) != g.num_vertices() - 1) return false;
  RollbackUnionFind uf(g.num_vertices());
  for (int e : t) {
    if (e > g.num_edges()) return false;
    if (!uf.unite(g.edge(e).tail, g.edge(e).head)) return false;
  }
  return true;
}

EdgeSet default_tree(const Graph& g) {
  RollbackUnionFind uf(g.num_vertices());
  std::vector<int> chosen;
  for (int e = 1; e <= g.num_edges(); ++e)
    if (uf.unite(g.edge(e).tail, g.edge(e).head)) chosen.push_back(e);
  return EdgeSet(std::move(chosen));
}

IntMatrix incidence_matrix(const Graph& g) {
  IntMatrix m(static_cast<std::size_t>(g.num_edges()), static_cast<std::size_t>(g.num_vertices() - 1));
  for (int e = 1; e <= g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    if (ed.is_self_loop()) continue;
    const auto row = static_cast<std::size_t>(e - 1);
    if (auto c = g.vertex_column(ed.tail)) m(row, static_cast<std::size_t>(*c)) = -1;
    if (auto c = g.vertex_column(ed.head)) m(row, static_cast<std::size_t>(*c)) = 1;
  }
  return m;
}

CycleBasis fundamental_cycle_basis(const Graph& g, const EdgeSet& tree) {
  require_tree(g, tree);
  const EdgeSet cotree = tree.complement(g.num_edges());
  IntMatrix c(static_cast<std::size_t>(g.num_edges()), cotree.size());
  std::size_t col = 0;
  for (int f : cotree) {
    c(static_cast<std::size_t>(f - 1), col) = 1;
    const Edge& ed = g.edge(f);
    if (!ed.is_self_loop())
      for (const Step& s : tree_path(g, tree, ed.head, ed.tail))
        c(static_cast<std::size_t>(s.label - 1), col) = s.sign;
    ++col;
  }
  CycleBasis basis;
  basis.columns_ = std::move(c);
  basis.defining_ = cotree.labels();
  basis.tree_ = tree;
  return basis;
}

CycleBasis default_cycle_basis(const Graph& g) { return fundamental_cycle_basis(g, default_tree(g)); }

CycleBasis CycleBasis::from_columns(const Graph& g, IntMatrix columns, bool require_simple) {
  if (columns.rows() != static_cast<std::size_t>(g.num_edges()) ||
      columns.cols() != static_cast<std::size_t>(g.loop_number()))
    throw std::invalid_argument("cycle basis must be |E| x loop number");
  const IntMatrix flow = incidence_matrix(g).transpose() * columns;
  for (std::size_t i = 0; i < flow.rows(); ++i)
    for (std::size_t j = 0; j < flow.cols(); ++j)
      if (flow(i, j) != 0)
        throw std::invalid_argument("cycle basis column " + std::to_string(j + 1) + " is not a cycle");
  if (rational_rank(columns) != columns.cols())
    throw std::invalid_argument("cycle basis columns are linearly dependent");
  if (require_simple)
    for (std::size_t j = 0; j < columns.cols(); ++j)
      if (!is_simple_cycle(g, columns, j))
        throw std::invalid_argument("cycle basis column " + std::to_string(j + 1) + " is not a simple cycle");
  CycleBasis basis;
  basis.columns_ = std::move(columns);
  return basis;
}

CycleBasis CycleBasis::transformed(const Graph& g, const IntMatrix& p) const {
  const auto d = determinant(p);
  if (d != 1 && d != -1) throw std::invalid_argument("basis change must have determinant +-1");
  return from_columns(g, columns_ * p, false);
}

IntMatrix path_matrix(const Graph& g, const std::optional<EdgeSet>& tree) {
  const EdgeSet t = tree ? *tree : default_tree(g);
  require_tree(g, t);
  IntMatrix p(static_cast<std::size_t>(g.num_edges()), static_cast<std::size_t>(g.num_vertices() - 1));
  for (int col = 0; col < g.num_vertices() - 1; ++col)
    for (const Step& s : tree_path(g, t, g.v_star(), g.column_vertex(col)))
      p(static_cast<std::size_t>(s.label - 1), static_cast<std::size_t>(col)) = s.sign;
  return p;
}

// ---------------------------------------------------------------------------
// Surgery

Graph contract_edge(const Graph& g, int e) {
  require_label(g, e);
  const Edge& ce = g.edge(e);
  if (ce.is_self_loop()) throw std::invalid_argument("cannot contract a self-loop");
  const int lo = std::min(ce.tail, ce.head), hi = std::max(ce.tail, ce.head);
  auto remap = [&](int v) { return v == hi ? lo : v > hi ? v - 1 : v; };
  std::vector<Edge> edges;
  for (int f = 1; f <= g.num_edges(); ++f) {
    if (f == e) continue;
    edges.push_back({remap(g.edge(f).tail), remap(g.edge(f).head)});
  }
  return Graph(g.num_vertices() - 1, std::move(edges), remap(g.v_star()));
}

Graph delete_edge(const Graph& g, int e) {
  require_label(g, e);
  std::vector<Edge> edges = g.edges();
  edges.erase(edges.begin() + (e - 1));
  if (!connected(g.num_vertices(), edges))
    throw ValidationError("deleting edge " + std::to_string(e) + " disconnects the graph");
  return Graph(g.num_vertices(), std::move(edges), g.v_star());
}

Graph subdivide_edge(const Graph& g, int e) {
  require_label(g, e);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(g.num_edges() + 1));
  for (int f = 1; f <= g.num_edges(); ++f) {
    const Edge& ed = g.edge(f);
    if (f == e) {
      edges.push_back({ed.tail + 1, 1});
      edges.push_back({1, ed.head + 1});
    } else {
      edges.push_back({ed.tail + 1, ed.head + 1});
    }
  }
  return Graph(g.num_vertices() + 1, std::move(edges), g.v_star() + 1);
}

CycleBasis subdivide_basis(const Graph& subdivided, const CycleBasis& basis, int e) {
  const IntMatrix& c = basis.matrix();
  IntMatrix out(c.rows() + 1, c.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const int label = static_cast<int>(r) + 1;
    const int source = label <= e ? label : label - 1;
    for (std::size_t j = 0; j < c.cols(); ++j) out(r, j) = c(static_cast<std::size_t>(source - 1), j);
  }
  const bool simple = basis.defining_edges().has_value();
  CycleBasis result = CycleBasis::from_columns(subdivided, std::move(out), simple);
  if (basis.tree() && basis.defining_edges()) {
    auto shift = [e](int x) { return x > e ? x + 1 : x; };
    std::vector<int> tree;
    for (int x : *basis.tree()) tree.push_back(shift(x));
    tree.push_back(e + 1);
    // Still fundamental: e+1 joins the tree and every defining edge keeps +1.
    CycleBasis fundamental = fundamental_cycle_basis(subdivided, EdgeSet(std::move(tree)));
    if (fundamental.matrix() == result.matrix()) return fundamental;
  }
  return result;
}

Graph dipole_graph(int n) {
  if (n < 1) throw std::invalid_argument("dipole needs at least one edge");
  return Graph(2, std::vector<Edge>(static_cast<std::size_t>(n), Edge{1, 2}));
}

// ---------------------------------------------------------------------------
// Formats

Graph parse_graph_text(std::string_view text) {
  std::vector<std::optional<Edge>> slots;
  std::optional<int> v_star;
  int max_vertex = 0;
  int line_no = 0;
  std::string statement;
  auto handle = [&](const std::string& raw) {
    std::string s = raw.substr(0, raw.find('#'));
    std::istringstream is(s);
    std::vector<std::string> tok;
    for (std::string t; is >> t;) tok.push_back(t);
    if (tok.empty()) return;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (tok[0] == "e") {
      if (tok.size() != 4) throw ParseError(where + "expected 'e <label> <tail> <head>'");
      const int label = parse_int(tok[1], "edge label");
      const int tail = parse_int(tok[2], "tail vertex");
      const int head = parse_int(tok[3], "head vertex");
      if (label < 1 || label > 32) throw ValidationError(where + "edge label out of range 1..32");
      if (tail < 1 || head < 1) throw ValidationError(where + "vertex index out of range");
      if (slots.size() < static_cast<std::size_t>(label)) slots.resize(static_cast<std::size_t>(label));
      auto& slot = slots[static_cast<std::size_t>(label - 1)];
      if (slot) throw ValidationError(where + "edge label " + tok[1] + " defined twice");
      slot = Edge{tail, head};
      max_vertex = std::max({max_vertex, tail, head});
    } else if (tok[0] == "vstar") {
      if (tok.size() != 2) throw ParseError(where + "expected 'vstar <index>'");
      if (v_star) throw ValidationError(where + "vstar given twice");
      v_star = parse_int(tok[1], "vertex index");
      if (*v_star < 1) throw ValidationError(where + "vertex index out of range");
      max_vertex = std::max(max_vertex, *v_star);
    } else {
      throw ParseError(where + "unknown statement '" + tok[0] + "'");
    }
  };
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    ++line_no;
    const std::string content(line.substr(0, line.find('#')));
    std::size_t start = 0;
    while (start <= content.size()) {
      const std::size_t semi = content.find(';', start);
      handle(content.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) throw ValidationError("edge labels must be contiguous; label " + std::to_string(i + 1) + " missing");
    edges.push_back(*slots[i]);
  }
  if (max_vertex == 0) throw ValidationError("empty graph description");
  return Graph(max_vertex, std::move(edges), v_star);
}

std::string to_text(const Graph& g) {
  std::string out;
  for (int e = 1; e <= g.num_edges(); ++e)
    out += "e " + std::to_string(e) + ' ' + std::to_string(g.edge(e).tail) + ' ' +
           std::to_string(g.edge(e).head) + '\n';
  out += "vstar " + std::to_string(g.v_star()) + '\n';
  return out;
}

Graph parse_graph_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("edges") || !doc["edges"].is_array())
    throw ParseError("expected an object with an \"edges\" array");
  std::vector<Edge> edges;
  int max_vertex = 0;
  for (const auto& item : doc["edges"]) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_number_integer() || !item[1].is_number_integer())
      throw ParseError("each edge must be a [tail, head] pair of integers");
    Edge e{item[0].get<int>(), item[1].get<int>()};
    if (e.tail < 1 || e.head < 1) throw ValidationError("vertex index out of range");
    max_vertex = std::max({max_vertex, e.tail, e.head});
    edges.push_back(e);
  }
  std::optional<int> v_star;
  if (doc.contains("v_star")) {
    if (!doc["v_star"].is_number_integer()) throw ParseError("\"v_star\" must be an integer");
    v_star = doc["v_star"].get<int>();
    if (*v_star < 1) throw ValidationError("vertex index out of range");
    max_vertex = std::max(max_vertex, *v_star);
  }
  if (max_vertex == 0) throw ValidationError("empty graph description");
  return Graph(max_vertex, std::move(edges), v_star);
}

std::string to_json_text(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges()) edges.push_back({e.tail, e.head});
  nlohmann::json doc{{"edges", edges}, {"v_star", g.v_star()}};
  return doc.dump();
}

Graph parse_graph(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return parse_graph_json(text);
  return parse_graph_text(text);
}

std::string fingerprint(const Graph& g) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_text(g)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace graphforms
