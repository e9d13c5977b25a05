#include <chrono>
#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "graphforms/forms_engine.hpp"
#include "random_graphs.hpp"

using namespace graphforms;

namespace {

Graph dunce() { return parse_graph_text("e 1 2 1\ne 2 1 3\ne 3 2 3\ne 4 2 3\n"); }
Graph double_triangle() {
  return parse_graph_text("e 1 3 2\ne 2 2 4\ne 3 3 1\ne 4 1 4\ne 5 3 4\nvstar 4\n");
}
MultiPoly a(int i) { return MultiPoly::variable(i); }
DiffForm da(std::initializer_list<int> labels, MultiPoly c) {
  return DiffForm::term(mask_of(std::vector<int>(labels)), std::move(c));
}

void require_report(const FormReport& r) {
  for (const auto& c : r.checks.checks) {
    INFO(r.subject << " / " << c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

IntMatrix random_unimodular(std::mt19937_64& rng, int n) {
  IntMatrix p = IntMatrix::identity(static_cast<std::size_t>(n));
  if (n == 0) return p;
  std::uniform_int_distribution<int> idx(0, n - 1), coef(-2, 2), coin(0, 3);
  for (int step = 0; step < 3 * n; ++step) {
    const int i = idx(rng), j = idx(rng);
    if (coin(rng) == 0) {
      for (int r = 0; r < n; ++r) p(static_cast<std::size_t>(r), static_cast<std::size_t>(i)) *= -1;
    } else if (i != j) {
      const int c = coef(rng);
      for (int r = 0; r < n; ++r)
        p(static_cast<std::size_t>(r), static_cast<std::size_t>(i)) +=
            c * p(static_cast<std::size_t>(r), static_cast<std::size_t>(j));
    }
  }
  return p;
}

}  // namespace

TEST_CASE("alpha of the dunce's cap") {
  const Graph g = dunce();
  const auto start = std::chrono::steady_clock::now();
  const FormExpression alpha = alpha_form(g);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const DiffForm numerator = da({1, 3}, -a(4)) + da({2, 3}, -a(4)) + da({1, 4}, a(3)) +
                             da({2, 4}, a(3)) + da({3, 4}, -(a(1) + a(2)));
  const FormExpression expected(Rational(1, 8), -1, 3, symanzik(g), 4, numerator);
  CHECK(alpha.numerator() == expected.numerator());
  CHECK(alpha.scalar() == expected.scalar());
  CHECK(forms_equal(alpha, expected));
  CHECK(seconds < 1.0);
}

TEST_CASE("alpha edge cases") {
  const Graph tree(3, {{1, 2}, {3, 2}});
  const FormExpression t = alpha_form(tree);
  CHECK(t.degree() == 0);
  CHECK(t.scalar().abs() == Rational(1));
  CHECK(t.psi_half() == 0);
  CHECK(alpha_form(parse_graph_text("e 1 1 2\ne 2 2 3\ne 3 3 1\n")).is_zero());
  CHECK_THROWS_AS((void)alpha_form(dipole_graph(9)), LoopLimitError);
  CHECK_THROWS_AS((void)phi_form(dipole_graph(9), dipole_basis(dipole_graph(9)), PhiMethod::dodgson_trees),
                  LoopLimitError);
}

TEST_CASE("phi of the theta graph") {
  const Graph g = dipole_graph(3);
  const CycleBasis basis = dipole_basis(g);
  CHECK(basis.matrix() == IntMatrix(3, 2, {1, 0, 0, 1, -1, -1}));
  const DiffForm numerator = da({2, 3}, a(1)) + da({1, 3}, -a(2)) + da({1, 2}, a(3));
  const FormExpression expected(Rational(1, 2), -1, 3, symanzik(g), 3, numerator);
  for (auto method : {PhiMethod::direct, PhiMethod::dodgson_trees}) {
    const FormExpression phi = phi_form(g, basis, method);
    CHECK(phi.numerator() == expected.numerator());
    CHECK(phi.scalar() == expected.scalar());
    CHECK(phi.pi_power() == -1);
  }
  CHECK(forms_equal(phi_via_hafnian(g, basis), expected));
  CHECK(sign_factor(g, basis, path_matrix(g)) == -1);
}

TEST_CASE("phi of the dunce's cap is -4 alpha") {
  const Graph g = dunce();
  const CycleBasis basis = fundamental_cycle_basis(g, EdgeSet{2, 4});
  CHECK(basis.matrix() == IntMatrix(4, 2, {1, 0, 1, 0, 0, 1, -1, -1}));
  const FormExpression phi = phi_form(g, basis);
  CHECK(forms_equal(phi, alpha_form(g).scaled(Rational(-4))));
  CHECK(sign_factor(g, basis, path_matrix(g)) == -1);
  const FormReport r = verify_main_theorem(g, basis);
  require_report(r);
  REQUIRE(r.ratio);
  CHECK(*r.ratio == ScaleRatio{Rational(-1, 4), 0});
}

TEST_CASE("sign factor rejects singular concatenations") {
  const Graph g = dipole_graph(3);
  const CycleBasis basis = dipole_basis(g);
  CHECK_THROWS_AS((void)sign_factor(g, basis, IntMatrix(3, 1, {0, 0, 0})), std::domain_error);
  const auto other = alternative_path_matrix(g, path_matrix(g));
  REQUIRE(other);
  CHECK(sign_factor(g, basis, *other) == sign_factor(g, basis, path_matrix(g)));
}

TEST_CASE("alpha and phi agree up to det[C|P] / 2^l on random graphs") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int loops = 2 * (trial % 3);
    const Graph g = testing_support::random_connected_graph(rng, loops, 8);
    INFO(to_text(g));
    require_report(verify_main_theorem(g, default_cycle_basis(g)));
  }
}

TEST_CASE("phi is covariant under a change of cycle basis") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const int loops = trial % 2 == 0 ? 2 : 4;
    const Graph g = testing_support::random_connected_graph(rng, loops, 8);
    const CycleBasis basis = default_cycle_basis(g);
    const IntMatrix p = random_unimodular(rng, loops);
    const CycleBasis changed = basis.transformed(g, p);
    const auto det_p = determinant(p);
    INFO(to_text(g));
    CHECK(forms_equal(phi_form(g, changed), phi_form(g, basis).scaled(Rational(det_p))));
    CHECK(forms_equal(phi_form(g, changed, PhiMethod::dodgson_trees), phi_form(g, changed)));
  }
}

TEST_CASE("dipole closed form") {
  for (int i = 1; i <= 3; ++i) {
    const Graph g = dipole_graph(2 * i + 1);
    const FormExpression closed = dipole_phi(i);
    CHECK(closed.degree() == 2 * i);
    CHECK(forms_equal(closed, phi_form(g, dipole_basis(g))));
    if (i <= 2) CHECK(forms_equal(closed, phi_form(g, dipole_basis(g), PhiMethod::dodgson_trees)));
  }
  CHECK(forms_equal(dipole_phi(1), phi_form(dipole_graph(3), dipole_basis(dipole_graph(3)))));
  CHECK_THROWS_AS((void)dipole_phi(0), std::invalid_argument);
}

TEST_CASE("subdivision chain theta -> dunce's cap -> double triangle") {
  const Graph theta = dipole_graph(3);
  const CycleBasis basis = dipole_basis(theta);
  const Graph g1 = subdivide_edge(theta, 1);
  CHECK(g1 == dunce());
  const FormReport r1 = subdivision_check(theta, basis, 1);
  require_report(r1);
  REQUIRE(r1.ratio);
  CHECK(*r1.ratio == ScaleRatio{Rational(1), 0});

  const CycleBasis b1 = subdivide_basis(g1, basis, 1);
  const Graph g2 = subdivide_edge(g1, 3);
  CHECK(g2 == double_triangle());
  const FormReport r2 = subdivision_check(g1, b1, 3);
  require_report(r2);
  REQUIRE(r2.ratio);
  CHECK(*r2.ratio == ScaleRatio{Rational(1), 0});

  // Composite pullback a1 -> a1 + a2, a2 -> a3 + a4, a3 -> a5.
  const auto s1 = subdivision_images(3, 1);
  const auto s3 = subdivision_images(4, 3);
  std::vector<MultiPoly> composite;
  for (const auto& p : s1) composite.push_back(p.substitute_all(s3));
  CHECK(forms_equal(alpha_form(g2), alpha_form(theta).pullback(composite, 5)));

  const FormExpression zero = FormExpression::zero(symanzik(theta), 3);
  CHECK(zero.pullback(s1, 4).is_zero());
}

TEST_CASE("subdivision on random graphs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing_support::random_connected_graph(rng, 2, 6);
    std::uniform_int_distribution<int> edge(1, g.num_edges());
    const int e = edge(rng);
    INFO(to_text(g) << "edge " << e);
    require_report(subdivision_check(g, e));
  }
}

TEST_CASE("form properties") {
  require_report(property_checks(dunce(), default_cycle_basis(dunce())));
  const Graph triangle = parse_graph_text("e 1 1 2\ne 2 2 3\ne 3 3 1\n");
  const FormReport odd = property_checks(triangle, default_cycle_basis(triangle));
  require_report(odd);
  CHECK(odd.form("phi")->is_zero());
  const Graph loop = parse_graph_text("e 1 1 2\ne 2 2 3\ne 3 3 1\ne 4 1 1\n");
  const FormReport self = property_checks(loop, default_cycle_basis(loop));
  require_report(self);
  CHECK(self.form("phi")->is_zero());
  CHECK(self.form("alpha")->is_zero());

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const Graph g = testing_support::random_connected_graph(rng, trial % 5, 7, true);
    INFO(to_text(g));
    require_report(property_checks(g, default_cycle_basis(g)));
  }
}

TEST_CASE("phi ^ phi vanishes non-trivially on the five-edge dipole") {
  const Graph g = dipole_graph(5);
  const FormReport r = property_checks(g, dipole_basis(g));
  require_report(r);
}

TEST_CASE("results do not depend on the worker count") {
  const Graph g = double_triangle();
  ::setenv("GRAPHFORMS_WORKERS", "1", 1);
  const FormExpression serial = alpha_form(g);
  ::setenv("GRAPHFORMS_WORKERS", "3", 1);
  const FormExpression threaded = alpha_form(g);
  CHECK(serial.to_string() == threaded.to_string());
  ::unsetenv("GRAPHFORMS_WORKERS");
}

TEST_CASE("dipole chart integrand") {
  const ChartIntegrand f = dipole_chart_integrand(1);
  CHECK(f.dims == 2);
  CHECK(f.numerator == MultiPoly(1));
  std::mt19937_64 rng(0);
  std::exponential_distribution<double> positive(1.0);
  for (int k = 0; k < 200; ++k) {
    const double p[] = {positive(rng), positive(rng)};
    CHECK(f(p) > 0);
  }
}

TEST_CASE("dipole integrals") {
  const NumericResult q = integrate_dipole_numeric(1, IntegrationScheme::quadrature);
  CHECK(std::abs(q.estimate - 1.0) < 1e-3);
  CHECK(q.error < 1e-3);

  NumericBudget small = default_budget(IntegrationScheme::monte_carlo);
  small.samples = 1'000'000;
  small.tolerance = 2e-2;
  const NumericResult mc = integrate_dipole_numeric(2, IntegrationScheme::monte_carlo, small);
  CHECK(std::abs(mc.estimate - 1.0) < 2e-2);
  const NumericResult again = integrate_dipole_numeric(2, IntegrationScheme::monte_carlo, small);
  CHECK(again.estimate == mc.estimate);

  small.samples = 1000;
  small.tolerance = 1e-9;
  CHECK_THROWS_AS((void)integrate_dipole_numeric(2, IntegrationScheme::monte_carlo, small), BudgetExhausted);
}
