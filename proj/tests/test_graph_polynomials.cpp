#include <random>
#include <stdexcept>

#include "doctest.h"
#include "graphforms/graph_polynomials.hpp"
#include "random_graphs.hpp"

using namespace graphforms;

namespace {

Graph dunce() { return parse_graph_text("e 1 2 1\ne 2 1 3\ne 3 2 3\ne 4 2 3\n"); }
MultiPoly a(int i) { return MultiPoly::variable(i); }
MultiPoly poly(const char* s) { return MultiPoly::parse(s); }

MultiPoly dodgson1(const Graph& g, int i, int j, DodgsonMethod m = DodgsonMethod::det) {
  const int x[] = {i};
  const int y[] = {j};
  return dodgson(g, x, y, m);
}

void require_report(const IdentityReport& r) {
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

}  // namespace

TEST_CASE("Symanzik polynomials of reference graphs") {
  CHECK(symanzik(dipole_graph(3)) == poly("a1*a2 + a1*a3 + a2*a3"));
  CHECK(symanzik(dunce()) == poly("a1*a3 + a1*a4 + a2*a3 + a2*a4 + a3*a4"));
  CHECK(symanzik(dunce(), SymanzikMethod::expanded_det) == symanzik(dunce()));
  CHECK(symanzik(Graph(3, {{1, 2}, {3, 2}})) == MultiPoly(1));
  CHECK(symanzik(dipole_graph(1), SymanzikMethod::cycle_det) == MultiPoly(1));
}

TEST_CASE("Dodgson polynomials") {
  Graph g = dunce();
  CHECK(dodgson1(g, 1, 3) == -a(4));
  CHECK(dodgson1(g, 1, 3, DodgsonMethod::expansion) == -a(4));
  std::vector<int> none;
  CHECK(dodgson(g, none, none) == symanzik(g));
  CHECK(dodgson(g, none, none, DodgsonMethod::expansion) == symanzik(g));
  // psi^{e,e} is the Symanzik polynomial of G \ e.
  for (int e = 1; e <= 4; ++e) {
    const MultiPoly del = symanzik(delete_edge(g, e)).substitute_all(relabel_after_removal(3, e));
    CHECK(dodgson1(g, e, e) == del);
  }
  const int vx[] = {5};
  const int ex[] = {1};
  CHECK_THROWS_AS(dodgson(g, vx, ex, DodgsonMethod::expansion), std::invalid_argument);
  const int two[] = {1, 2};
  CHECK_THROWS_AS(dodgson(g, two, ex), std::invalid_argument);
  const int far[] = {7};
  CHECK_THROWS_AS(dodgson(g, far, ex), std::out_of_range);
  CHECK(expanded_index_of_vertex(g, 1) == 5);
  CHECK_THROWS_AS(expanded_index_of_vertex(g, 3), std::invalid_argument);
}

TEST_CASE("Laplacian bundle of reference graphs") {
  Graph theta = dipole_graph(3);
  auto b = laplacian_bundle(theta, fundamental_cycle_basis(theta, EdgeSet{3}));
  CHECK(b.Lambda == PolyMatrix{{a(1) + a(3), a(3)}, {a(3), a(2) + a(3)}});
  auto d = laplacian_bundle(dunce(), fundamental_cycle_basis(dunce(), EdgeSet{2, 4}));
  CHECK(d.Lambda == PolyMatrix{{a(1) + a(2) + a(4), a(4)}, {a(4), a(3) + a(4)}});
  CHECK(d.M.rows() == 6);
  CHECK(determinant(d.L_cleared) == symanzik(dunce()) * edge_variable_product(dunce()).pow(1));
}

TEST_CASE("theta inverse cycle Laplacian entry") {
  Graph theta = dipole_graph(3);
  auto b = laplacian_bundle(theta, fundamental_cycle_basis(theta, EdgeSet{3}));
  CHECK(adjugate(b.Lambda)(0, 0) == a(2) + a(3));
  CHECK(dodgson1(theta, 1, 1) == a(2) + a(3));
}

TEST_CASE("random graphs: three Symanzik routes, two Dodgson routes, structure") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    Graph g = testing_support::random_connected_graph(rng, trial % 4, 8, trial % 5 == 0);
    const MultiPoly psi = symanzik(g);
    CHECK(symanzik(g, SymanzikMethod::expanded_det) == psi);
    CHECK(symanzik(g, SymanzikMethod::cycle_det) == psi);
    const auto trees = spanning_trees(g);
    CycleBasis other = fundamental_cycle_basis(g, trees.back());
    CHECK(symanzik(g, SymanzikMethod::cycle_det, &other) == psi);
    for (const auto& [m, c] : psi.terms()) {
      CHECK(c > Rational(0));
      CHECK(c.is_integer());
      for (int v = 1; v <= g.num_edges(); ++v) CHECK(m.exponent(v) <= 1);
    }
    for (int i = 1; i <= g.num_edges(); ++i)
      for (int j = 1; j <= g.num_edges(); ++j)
        CHECK(dodgson1(g, i, j) == dodgson1(g, i, j, DodgsonMethod::expansion));
    // Contraction-deletion; bridges have psi^{e,e} = 0 and psi = psi_{G/e}.
    for (int e = 1; e <= g.num_edges(); ++e) {
      if (g.edge(e).is_self_loop()) continue;
      const MultiPoly contracted =
          symanzik(contract_edge(g, e)).substitute_all(relabel_after_removal(g.num_edges() - 1, e));
      CHECK(contracted == psi.substitute(e, MultiPoly()));
      CHECK(psi == a(e) * dodgson1(g, e, e) + contracted);
      bool bridge = false;
      try {
        delete_edge(g, e);
      } catch (const ValidationError&) {
        bridge = true;
      }
      if (bridge) {
        CHECK(dodgson1(g, e, e).is_zero());
        CHECK(psi == contracted);
      }
    }
  }
}

TEST_CASE("identity reports on the dunce's cap") {
  Graph g = dunce();
  CycleBasis b = fundamental_cycle_basis(g, EdgeSet{2, 4});
  require_report(inverse_entries_via_dodgson(g, b));
  IdentityReport r = concatenated_det_identities(g, b, path_matrix(g));
  require_report(r);
  CHECK(determinant(hconcat(b.matrix(), path_matrix(g))) == -1);
  CHECK(determinant(hconcat(b.matrix(), incidence_matrix(g))) == -5);
}

TEST_CASE("identity reports on random graphs and bases") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    Graph g = testing_support::random_connected_graph(rng, trial % 5, 8, trial % 7 == 0);
    const auto trees = spanning_trees(g);
    std::uniform_int_distribution<std::size_t> pick(0, trees.size() - 1);
    CycleBasis b = fundamental_cycle_basis(g, trees[pick(rng)]);
    DodgsonCache cache(g);
    require_report(inverse_entries_via_dodgson(g, b, &cache));
    require_report(concatenated_det_identities(g, b, path_matrix(g, trees[pick(rng)]), &cache));
  }
}

TEST_CASE("Dodgson cache is symmetric and shared") {
  Graph g = dunce();
  DodgsonCache cache(g);
  CHECK(cache.get(3, 1) == -a(4));
  CHECK(cache.get(1, 3) == -a(4));
  CHECK(cache.size() == 1);
}
