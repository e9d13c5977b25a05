#include <random>
#include <stdexcept>

#include "doctest.h"
#include "graphforms/graph.hpp"
#include "random_graphs.hpp"

using namespace graphforms;

namespace {

Graph dunce() { return parse_graph_text("e 1 2 1\ne 2 1 3\ne 3 2 3\ne 4 2 3\n"); }
Graph theta() { return dipole_graph(3); }

std::int64_t brute_force_tree_count(const Graph& g) {
  std::int64_t count = 0;
  const int m = g.num_edges(), k = g.num_vertices() - 1;
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<int> labels;
    for (int e = 1; e <= m; ++e)
      if (mask & (1u << (e - 1))) labels.push_back(e);
    // Spanning iff the chosen edges connect all vertices.
    std::vector<int> comp(static_cast<std::size_t>(g.num_vertices() + 1));
    std::iota(comp.begin(), comp.end(), 0);
    for (int e : labels) {
      int a = comp[static_cast<std::size_t>(g.edge(e).tail)], b = comp[static_cast<std::size_t>(g.edge(e).head)];
      for (auto& c : comp)
        if (c == b) c = a;
    }
    bool ok = true;
    for (int v = 2; v <= g.num_vertices(); ++v)
      ok = ok && comp[static_cast<std::size_t>(v)] == comp[1];
    count += ok;
  }
  return count;
}

}  // namespace

TEST_CASE("parsing the dunce's cap") {
  Graph g = dunce();
  CHECK(g.num_vertices() == 3);
  CHECK(g.num_edges() == 4);
  CHECK(g.loop_number() == 2);
  CHECK(g.v_star() == 3);
  CHECK(parse_graph("e 1 2 1; e 2 1 3; e 3 2 3; e 4 2 3") == g);
  CHECK(parse_graph("# comment\ne 4 2 3\ne 2 1 3 # trailing\ne 1 2 1\ne 3 2 3\nvstar 3\n") == g);
}

TEST_CASE("parse errors and validation errors") {
  CHECK(parse_graph("e 1 1 2").loop_number() == 0);
  CHECK_THROWS_AS(parse_graph("e 1 1 2\ne 2 3 4"), ValidationError);
  CHECK_THROWS_AS(parse_graph("e 1 1 2\ne 3 2 1"), ValidationError);
  CHECK_THROWS_AS(parse_graph("e 1 1"), ParseError);
  CHECK_THROWS_AS(parse_graph("edge 1 1 2"), ParseError);
  CHECK_THROWS_AS(parse_graph("e 1 x 2"), ParseError);
  CHECK_THROWS_AS(parse_graph("e 1 0 2"), ValidationError);
  CHECK_THROWS_AS(parse_graph("e 1 1 2\ne 1 1 2"), ValidationError);
  CHECK_THROWS_AS(parse_graph("{\"edges\": [[1,2],[3,4]]}"), ValidationError);
  CHECK_THROWS_AS(parse_graph("{\"edges\": [[1,2]"), ParseError);
  CHECK_THROWS_AS(parse_graph("{\"edges\": [[1]]}"), ParseError);
}

TEST_CASE("text and JSON round trips are byte exact") {
  Graph g = dunce();
  const std::string text = to_text(g);
  CHECK(text == "e 1 2 1\ne 2 1 3\ne 3 2 3\ne 4 2 3\nvstar 3\n");
  CHECK(to_text(parse_graph(text)) == text);
  const std::string json = to_json_text(g);
  CHECK(json == R"({"edges":[[2,1],[1,3],[2,3],[2,3]],"v_star":3})");
  CHECK(to_json_text(parse_graph(json)) == json);
  CHECK(parse_graph(json) == g);
  Graph h(3, {{1, 2}, {2, 3}}, 1);
  CHECK(parse_graph(to_text(h)) == h);
  CHECK(parse_graph(to_json_text(h)) == h);
  CHECK(fingerprint(g) == fingerprint(parse_graph(json)));
  CHECK(fingerprint(g) != fingerprint(h));
}

TEST_CASE("spanning trees") {
  // Edges 3 and 4 are parallel, so {3,4} closes a cycle while {1,2} is a path.
  CHECK(spanning_trees(dunce()) == std::vector<EdgeSet>{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}});
  CHECK(spanning_trees(theta()) == std::vector<EdgeSet>{{1}, {2}, {3}});
  CHECK(spanning_trees(dipole_graph(1)) == std::vector<EdgeSet>{{1}});
  Graph loop(1, {{1, 1}});
  CHECK(spanning_trees(loop) == std::vector<EdgeSet>{EdgeSet{}});
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = testing_support::random_connected_graph(rng, trial % 4, 9, true);
    auto trees = spanning_trees(g);
    CHECK(static_cast<std::int64_t>(trees.size()) == brute_force_tree_count(g));
    CHECK(std::is_sorted(trees.begin(), trees.end()));
    for (const auto& t : trees)
      for (int e : t) CHECK(!g.edge(e).is_self_loop());
    CHECK(default_tree(g) == trees.front());
  }
}

TEST_CASE("incidence, cycle and path matrices") {
  CHECK(incidence_matrix(theta()) == IntMatrix{{-1}, {-1}, {-1}});
  Graph sl(2, {{1, 2}, {1, 1}});
  CHECK(incidence_matrix(sl) == IntMatrix{{-1}, {0}});

  CycleBasis c = fundamental_cycle_basis(theta(), EdgeSet{3});
  CHECK(c.matrix() == IntMatrix{{1, 0}, {0, 1}, {-1, -1}});
  CHECK(*c.defining_edges() == std::vector<int>{1, 2});

  CycleBasis dc = fundamental_cycle_basis(dunce(), EdgeSet{2, 4});
  CHECK(dc.matrix() == IntMatrix{{1, 0}, {1, 0}, {0, 1}, {-1, -1}});

  CHECK(path_matrix(dipole_graph(1)) == IntMatrix{{-1}});
  CHECK(path_matrix(theta(), EdgeSet{1}) == IntMatrix{{-1}, {0}, {0}});
  CHECK_THROWS_AS(fundamental_cycle_basis(dunce(), EdgeSet{3, 4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(fundamental_cycle_basis(theta(), EdgeSet{1, 2}), std::invalid_argument);

  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = testing_support::random_connected_graph(rng, trial % 5, 9, true);
    IntMatrix inc = incidence_matrix(g);
    for (const auto& t : spanning_trees(g)) {
      CycleBasis b = fundamental_cycle_basis(g, t);
      CHECK(inc.transpose() * b.matrix() == IntMatrix(inc.cols(), b.matrix().cols()));
      CHECK(path_matrix(g, t).transpose() * inc == IntMatrix::identity(inc.cols()));
      const auto d = determinant(select_rows(inc, t.indices()));
      CHECK((d == 1 || d == -1));
      for (std::size_t j = 0; j < b.defining_edges()->size(); ++j) {
        const int f = (*b.defining_edges())[j];
        CHECK(b.matrix()(static_cast<std::size_t>(f - 1), j) == 1);
        for (int other : *b.defining_edges())
          if (other != f) CHECK(b.matrix()(static_cast<std::size_t>(other - 1), j) == 0);
      }
    }
  }
}

TEST_CASE("cycle basis validation") {
  Graph g = dunce();
  CHECK_NOTHROW(CycleBasis::from_columns(g, IntMatrix{{1, 0}, {1, 0}, {0, 1}, {-1, -1}}));
  // A sum of two cycles sharing an edge is not simple.
  CHECK_THROWS_AS(CycleBasis::from_columns(g, IntMatrix{{1, 1}, {1, 1}, {0, 1}, {-1, -2}}), std::invalid_argument);
  CHECK_NOTHROW(CycleBasis::from_columns(g, IntMatrix{{1, 1}, {1, 1}, {0, 1}, {-1, -2}}, false));
  CHECK_THROWS_AS(CycleBasis::from_columns(g, IntMatrix{{1, 1}, {1, 1}, {0, 0}, {-1, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(CycleBasis::from_columns(g, IntMatrix{{1, 0}, {0, 0}, {0, 1}, {-1, -1}}), std::invalid_argument);
  CycleBasis b = default_cycle_basis(g);
  CHECK(b.transformed(g, IntMatrix{{1, 1}, {0, 1}}).matrix() == b.matrix() * IntMatrix{{1, 1}, {0, 1}});
  CHECK_THROWS_AS((void)b.transformed(g, IntMatrix{{2, 0}, {0, 1}}), std::invalid_argument);
}

TEST_CASE("contraction, deletion, subdivision") {
  Graph c = contract_edge(dunce(), 1);
  CHECK(c == dipole_graph(3));
  // Contracting one of the two parallel edges leaves the other as a self-loop.
  Graph c4 = contract_edge(dunce(), 4);
  CHECK(c4.num_vertices() == 2);
  CHECK(c4.loop_number() == 2);
  CHECK(c4.has_self_loop());

  Graph d = delete_edge(theta(), 3);
  CHECK(d.num_edges() == 2);
  CHECK(d.loop_number() == 1);
  CHECK_THROWS_AS(delete_edge(dipole_graph(1), 1), ValidationError);
  CHECK_THROWS_AS(contract_edge(Graph(2, {{1, 2}, {2, 2}}), 2), std::invalid_argument);

  CHECK(subdivide_edge(theta(), 1) == dunce());
  Graph dt = subdivide_edge(subdivide_edge(theta(), 1), 3);
  CHECK(dt == parse_graph("e 1 3 2\ne 2 2 4\ne 3 3 1\ne 4 1 4\ne 5 3 4\nvstar 4"));
  CHECK(dt.loop_number() == 2);

  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Graph g = testing_support::random_connected_graph(rng, trial % 4, 8, true);
    std::uniform_int_distribution<int> pick(1, g.num_edges());
    const int e = pick(rng);
    Graph s = subdivide_edge(g, e);
    CHECK(s.loop_number() == g.loop_number());
    // Contracting e'' undoes the subdivision, up to the vertex relabelling.
    Graph back = contract_edge(s, e + 1);
    REQUIRE(back.num_edges() == g.num_edges());
    std::vector<int> to_original(static_cast<std::size_t>(back.num_vertices() + 1));
    bool consistent = true;
    for (int f = 1; f <= g.num_edges(); ++f) {
      const Edge& be = back.edge(f);
      const Edge& ge = g.edge(f);
      for (auto [x, y] : {std::pair{be.tail, ge.tail}, std::pair{be.head, ge.head}}) {
        auto& slot = to_original[static_cast<std::size_t>(x)];
        if (slot == 0) slot = y;
        consistent = consistent && slot == y;
      }
    }
    CHECK(consistent);
  }
}

TEST_CASE("induced basis on a subdivision") {
  Graph g = theta();
  CycleBasis b = fundamental_cycle_basis(g, EdgeSet{3});
  Graph s = subdivide_edge(g, 1);
  CycleBasis sb = subdivide_basis(s, b, 1);
  CHECK(sb.matrix() == IntMatrix{{1, 0}, {1, 0}, {0, 1}, {-1, -1}});
  REQUIRE(sb.tree().has_value());
  CHECK(*sb.tree() == EdgeSet{2, 4});
}
