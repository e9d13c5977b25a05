#include "graphforms/forms_engine.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "graphforms/parallel.hpp"

namespace graphforms {

const FormExpression* FormReport::form(const std::string& name) const {
  for (const auto& [key, value] : forms)
    if (key == name) return &value;
  return nullptr;
}

namespace {

std::int64_t factorial(int n) {
  std::int64_t r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

Rational power(std::int64_t base, int exponent) { return Rational(base).pow(exponent); }

int determinant_of_rows(const IntMatrix& m, const EdgeSet& rows) {
  const auto idx = rows.indices();
  return static_cast<int>(determinant(select_rows(m, idx)));
}

/// sum over all orderings (f_1..f_l) of the labels of psi^{f1,f2} ... psi^{f_{l-1},f_l}.
MultiPoly pairing_permutation_sum(std::vector<int> labels, DodgsonCache& cache) {
  std::sort(labels.begin(), labels.end());
  MultiPoly total;
  do {
    MultiPoly product(1);
    for (std::size_t k = 0; k + 1 < labels.size(); k += 2) {
      product *= cache.get(labels[k], labels[k + 1]);
      if (product.is_zero()) break;
    }
    total += product;
  } while (std::next_permutation(labels.begin(), labels.end()));
  return total;
}

void require_permutation_cap(const Graph& g, const char* what) {
  if (g.loop_number() > kMaxPermutationLoops) {
    std::ostringstream os;
    os << what << ": loop number " << g.loop_number() << " exceeds the permutation-sum limit "
       << kMaxPermutationLoops;
    throw LoopLimitError(os.str());
  }
}

/// Sum over spanning trees, evaluated concurrently and reduced in tree order.
DiffForm tree_sum(const std::vector<EdgeSet>& trees,
                  const std::function<DiffForm(const EdgeSet&)>& summand) {
  std::vector<DiffForm> parts(trees.size());
  parallel_for(trees.size(), [&](std::size_t k) { parts[k] = summand(trees[k]); });
  DiffForm total;
  for (const auto& p : parts) total += p;
  return total;
}

PolyMatrix cycle_laplacian(const Graph& g, const IntMatrix& c) {
  const PolyMatrix cp = to_poly_matrix(c);
  return cp.transpose() * edge_variable_matrix(g) * cp;
}

FormReport make_report(std::string subject, const Graph& g, const CycleBasis* basis) {
  FormReport r;
  r.subject = std::move(subject);
  r.graph_fingerprint = fingerprint(g);
  r.loop_number = g.loop_number();
  if (basis) {
    r.basis = basis->matrix();
    r.tree = basis->tree();
  }
  return r;
}

}  // namespace

FormExpression alpha_form(const Graph& g, DodgsonCache* cache) {
  const int l = g.loop_number();
  const int m = g.num_edges();
  MultiPoly psi = symanzik(g);
  if (l % 2 == 1) return FormExpression::zero(std::move(psi), m);
  require_permutation_cap(g, "alpha");
  std::optional<DodgsonCache> local;
  if (!cache) cache = &local.emplace(g);
  const IntMatrix inc = incidence_matrix(g);
  const DiffForm numerator = tree_sum(spanning_trees(g), [&](const EdgeSet& t) {
    const int sign = determinant_of_rows(inc, t);
    const auto complement = t.complement(m).labels();
    MultiPoly coefficient = pairing_permutation_sum(complement, *cache);
    coefficient.scale(Rational(sign));
    return DiffForm::term(mask_of(complement), std::move(coefficient));
  });
  const Rational scalar = (power(4, l) * Rational(factorial(l / 2))).inverse();
  return FormExpression(scalar, -l / 2, l + 1, std::move(psi), m, numerator);
}

FormExpression phi_form(const Graph& g, const CycleBasis& basis, PhiMethod method,
                        DodgsonCache* cache) {
  const int l = g.loop_number();
  const int m = g.num_edges();
  if (basis.size() != l || static_cast<int>(basis.matrix().rows()) != m)
    throw std::invalid_argument("cycle basis does not match the graph");
  MultiPoly psi = symanzik(g);
  if (l % 2 == 1) return FormExpression::zero(std::move(psi), m);
  if (l == 0) return FormExpression(Rational(1), 0, 1, std::move(psi), m, DiffForm(1));

  if (method == PhiMethod::direct) {
    const PolyMatrix lambda = cycle_laplacian(g, basis.matrix());
    const auto d_lambda = lambda.map([](const MultiPoly& p) { return DiffForm::differential(p); });
    const auto adj = convert<DiffForm>(adjugate(lambda));
    const RingMatrix<DiffForm> b = d_lambda * adj * d_lambda;
    if (!is_skew_symmetric(b))
      throw std::logic_error("dL adj(L) dL is not skew-symmetric");
    const Rational scalar = power(-2, l / 2).inverse();
    return FormExpression(scalar, -l / 2, l + 1, std::move(psi), m, pfaffian(b));
  }

  require_permutation_cap(g, "phi via trees");
  std::optional<DodgsonCache> local;
  if (!cache) cache = &local.emplace(g);
  const DiffForm numerator = tree_sum(spanning_trees(g), [&](const EdgeSet& t) {
    const EdgeSet complement = t.complement(m);
    const int det_c = determinant_of_rows(basis.matrix(), complement);
    if (det_c == 0) return DiffForm();
    const int sign = complement.label_sum() % 2 == 0 ? det_c : -det_c;
    MultiPoly coefficient = pairing_permutation_sum(complement.labels(), *cache);
    coefficient.scale(Rational(sign));
    return DiffForm::term(complement.mask(), std::move(coefficient));
  });
  const Rational scalar = (power(-1, l / 2) * power(2, l) * Rational(factorial(l / 2))).inverse();
  return FormExpression(scalar, -l / 2, l + 1, std::move(psi), m, numerator);
}

FormExpression phi_via_hafnian(const Graph& g, const CycleBasis& basis) {
  const int l = g.loop_number();
  const int m = g.num_edges();
  MultiPoly psi = symanzik(g);
  if (l % 2 == 1) return FormExpression::zero(std::move(psi), m);
  const DiffForm numerator = tree_sum(spanning_trees(g), [&](const EdgeSet& t) {
    const EdgeSet complement = t.complement(m);
    const int det_c = determinant_of_rows(basis.matrix(), complement);
    if (det_c == 0) return DiffForm();
    const CycleBasis fundamental = fundamental_cycle_basis(g, t);
    MultiPoly h = hafnian(adjugate(cycle_laplacian(g, fundamental.matrix())));
    h.scale(Rational(det_c));
    return DiffForm::term(complement.mask(), std::move(h));
  });
  const Rational scalar = power(-2, l / 2).inverse();
  return FormExpression(scalar, -l / 2, l + 1, std::move(psi), m, numerator);
}

std::optional<IntMatrix> alternative_path_matrix(const Graph& g, const IntMatrix& pathm) {
  const auto trees = spanning_trees(g);
  for (auto it = trees.rbegin(); it != trees.rend(); ++it) {
    IntMatrix candidate = path_matrix(g, *it);
    if (!(candidate == pathm)) return candidate;
  }
  return std::nullopt;
}

namespace {

int concatenated_sign(const CycleBasis& basis, const IntMatrix& pathm) {
  const std::int64_t d = determinant(hconcat(basis.matrix(), pathm));
  if (d != 1 && d != -1) {
    std::ostringstream os;
    os << "det[C|P] = " << d << ", expected +-1";
    throw std::domain_error(os.str());
  }
  return static_cast<int>(d);
}

}  // namespace

int sign_factor(const Graph& g, const CycleBasis& basis, const IntMatrix& pathm) {
  const int s = concatenated_sign(basis, pathm);
  if (auto other = alternative_path_matrix(g, pathm)) {
    if (concatenated_sign(basis, *other) != s)
      throw std::logic_error("det[C|P] depends on the choice of path matrix");
  }
  return s;
}

FormReport verify_main_theorem(const Graph& g, const CycleBasis& basis) {
  FormReport r = make_report("alpha vs phi", g, &basis);
  const int l = g.loop_number();
  DodgsonCache cache(g);
  const FormExpression alpha = alpha_form(g, &cache);
  const FormExpression phi = phi_form(g, basis, PhiMethod::direct);
  const FormExpression phi_trees = phi_form(g, basis, PhiMethod::dodgson_trees, &cache);
  const FormExpression phi_haf = phi_via_hafnian(g, basis);
  r.forms = {{"alpha", alpha}, {"phi", phi}, {"phi_trees", phi_trees}};

  r.checks.add("phi: Pfaffian route equals spanning-tree route", forms_equal(phi, phi_trees));
  r.checks.add("phi: Pfaffian route equals hafnian route", forms_equal(phi, phi_haf));

  const IntMatrix pathm = path_matrix(g);
  const int sign = concatenated_sign(basis, pathm);
  if (auto other = alternative_path_matrix(g, pathm)) {
    const int s2 = concatenated_sign(basis, *other);
    r.checks.add("det[C|P] independent of the path matrix", s2 == sign,
                 "det[C|P] = " + std::to_string(sign) + " and " + std::to_string(s2));
  } else {
    r.notes.push_back("single spanning tree: the path matrix is unique");
  }

  const Rational factor(sign, std::int64_t{1} << l);
  r.checks.add("alpha = det[C|P] / 2^l * phi", forms_equal(alpha, phi.scaled(factor)),
               "det[C|P] = " + std::to_string(sign) + ", expected ratio " + factor.to_string());
  if (l % 2 == 1) {
    r.notes.push_back("odd loop number: alpha and phi vanish");
    r.checks.add("alpha and phi vanish for odd loop number", alpha.is_zero() && phi.is_zero());
  } else if (!phi.is_zero()) {
    r.ratio = scale_ratio(alpha, phi);
  }
  if (l == 0) {
    const bool ok = forms_equal(phi, FormExpression(Rational(1), 0, 0, phi.psi(), g.num_edges(), 1)) &&
                    forms_equal(alpha, phi.scaled(Rational(static_cast<std::int64_t>(determinant(pathm)))));
    r.checks.add("tree: phi = 1 and alpha = det P", ok);
  }
  return r;
}

CycleBasis dipole_basis(const Graph& dipole) {
  return fundamental_cycle_basis(dipole, EdgeSet{dipole.num_edges()});
}

FormExpression dipole_phi(int i) {
  if (i < 1) throw std::invalid_argument("dipole index must be positive");
  const int n = 2 * i + 1;
  MultiPoly product(1);
  for (int e = 1; e <= n; ++e) product *= MultiPoly::variable(e);
  MultiPoly psi;
  for (int e = 1; e <= n; ++e) psi += exact_divide(product, MultiPoly::variable(e));
  const EdgeMask all = (EdgeMask{1} << n) - 1;
  DiffForm sum;
  for (int e = 1; e <= n; ++e) {
    MultiPoly c = MultiPoly::variable(e);
    if (e % 2 == 0) c = -c;
    sum += DiffForm::term(all & ~(EdgeMask{1} << (e - 1)), std::move(c));
  }
  sum.multiply(product.pow(static_cast<unsigned>(i - 1)));
  const Rational scalar(factorial(2 * i), power(4, i).num() * factorial(i));
  return FormExpression(scalar, -i, n, std::move(psi), n, sum);
}

std::vector<MultiPoly> subdivision_images(int num_edges, int e) {
  std::vector<MultiPoly> images;
  images.reserve(static_cast<std::size_t>(num_edges));
  for (int k = 1; k <= num_edges; ++k) {
    if (k < e) images.push_back(MultiPoly::variable(k));
    else if (k == e) images.push_back(MultiPoly::variable(e) + MultiPoly::variable(e + 1));
    else images.push_back(MultiPoly::variable(k + 1));
  }
  return images;
}

FormReport subdivision_check(const Graph& g, const CycleBasis& basis, int e) {
  FormReport r = make_report("subdivision of edge " + std::to_string(e), g, &basis);
  const Graph sub = subdivide_edge(g, e);
  const CycleBasis sub_basis = subdivide_basis(sub, basis, e);
  const int m = g.num_edges();
  const auto images = subdivision_images(m, e);
  const int expected_sign = e % 2 == 1 ? 1 : -1;

  r.checks.add("psi pulls back to psi of the subdivided graph",
               symanzik(g).substitute_all(images) == symanzik(sub));

  const FormExpression phi = phi_form(g, basis);
  const FormExpression phi_sub = phi_form(sub, sub_basis);
  r.checks.add("phi(G') = s^* phi(G)", forms_equal(phi_sub, phi.pullback(images, m + 1)));
  r.forms = {{"phi", phi}, {"phi_subdivided", phi_sub}};

  if (g.loop_number() <= kMaxPermutationLoops) {
    const FormExpression alpha = alpha_form(g);
    const FormExpression alpha_sub = alpha_form(sub);
    const FormExpression pulled = alpha.pullback(images, m + 1);
    r.checks.add("alpha(G') = (-1)^(e+1) s^* alpha(G)",
                 forms_equal(alpha_sub, pulled.scaled(Rational(expected_sign))),
                 "(-1)^(e+1) = " + std::to_string(expected_sign));
    r.forms.emplace_back("alpha", alpha);
    r.forms.emplace_back("alpha_subdivided", alpha_sub);
    if (!pulled.is_zero()) r.ratio = scale_ratio(alpha_sub, pulled);
  } else {
    r.notes.push_back("alpha skipped: loop number above the permutation-sum limit");
  }

  const int sign = concatenated_sign(basis, path_matrix(g));
  const int sign_sub = concatenated_sign(sub_basis, path_matrix(sub));
  // The expansion along the new vertex column contributes (-1)^(e+l+1).
  const int det_sign = (e + 1 + g.loop_number()) % 2 == 0 ? 1 : -1;
  r.checks.add("det[C'|P'] = (-1)^(e+l+1) det[C|P]", sign_sub == det_sign * sign,
               "det[C|P] = " + std::to_string(sign) + ", det[C'|P'] = " + std::to_string(sign_sub));
  return r;
}

FormReport subdivision_check(const Graph& g, int e) {
  return subdivision_check(g, default_cycle_basis(g), e);
}

FormReport property_checks(const Graph& g, const CycleBasis& basis) {
  FormReport r = make_report("form properties", g, &basis);
  const int l = g.loop_number();
  const int m = g.num_edges();
  const FormExpression phi = phi_form(g, basis);
  r.forms.emplace_back("phi", phi);
  std::optional<FormExpression> alpha;
  if (l <= kMaxPermutationLoops) {
    alpha = alpha_form(g);
    r.forms.emplace_back("alpha", *alpha);
  } else {
    r.notes.push_back("alpha skipped: loop number above the permutation-sum limit");
  }

  r.checks.add("d phi = 0", phi.exterior_derivative().is_zero());
  if (alpha) r.checks.add("d alpha = 0", alpha->exterior_derivative().is_zero());

  if (l > 0) {
    const bool trivial = 2 * l > m;
    r.checks.add("phi ^ phi = 0", wedge(phi, phi).is_zero(),
                 trivial ? "trivial by degree (2l > |E|)" : "non-trivial (2l <= |E|)");
  }

  if (l % 2 == 1) {
    r.notes.push_back("odd loop number");
    r.checks.add("phi = 0 for odd loop number", phi.is_zero());
    if (alpha) r.checks.add("alpha = 0 for odd loop number", alpha->is_zero());
  }
  if (g.has_self_loop()) {
    r.notes.push_back("graph has a self-loop");
    r.checks.add("phi = 0 with a self-loop", phi.is_zero());
    if (alpha) r.checks.add("alpha = 0 with a self-loop", alpha->is_zero());
  }

  auto weight_detail = [](const FormExpression& f) {
    if (f.is_zero()) return std::string("zero form");
    const auto w = f.doubled_weight();
    return w ? "doubled weight " + std::to_string(*w) : std::string("mixed weight");
  };
  auto weight_zero = [](const FormExpression& f) {
    return f.is_zero() || f.doubled_weight() == std::optional<int>(0);
  };
  r.checks.add("phi invariant under a -> t a", weight_zero(phi), weight_detail(phi));
  if (alpha) r.checks.add("alpha invariant under a -> t a", weight_zero(*alpha), weight_detail(*alpha));

  if (l == 0) {
    const int det_p = static_cast<int>(determinant(path_matrix(g)));
    r.checks.add("tree: phi = +1", forms_equal(phi, FormExpression(Rational(1), 0, 0, phi.psi(), m, 1)));
    if (alpha)
      r.checks.add("tree: alpha = det P = +-1", forms_equal(*alpha, phi.scaled(Rational(det_p))),
                   "det P = " + std::to_string(det_p));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Numeric integration of the dipole forms.

double ChartIntegrand::operator()(std::span<const double> point) const {
  const double q = psi.evaluate(point);
  return prefactor * numerator.evaluate(point) / std::pow(q, 0.5 * psi_half);
}

ChartIntegrand dipole_chart_integrand(int i) {
  const FormExpression phi = dipole_phi(i);
  const int n = 2 * i + 1;
  std::vector<MultiPoly> images;
  for (int k = 1; k < n; ++k) images.push_back(MultiPoly::variable(k));
  images.emplace_back(1);
  const EdgeMask chart_mask = (EdgeMask{1} << (n - 1)) - 1;
  ChartIntegrand f;
  f.dims = n - 1;
  f.prefactor = phi.scalar().to_double() * std::pow(std::numbers::pi, phi.pi_power());
  f.numerator = phi.numerator().pullback(images).coefficient(chart_mask);
  f.psi = phi.psi().substitute_all(images);
  f.psi_half = phi.psi_half();
  return f;
}

NumericBudget default_budget(IntegrationScheme scheme) {
  NumericBudget b;
  b.tolerance = scheme == IntegrationScheme::quadrature ? 1e-6 : 1e-2;
  return b;
}

namespace {

struct NestedQuadrature {
  double value = 0;
  double outer_error = 0;
  std::uint64_t evaluations = 0;
};

/// Iterated tanh-sinh over (0,1)^dims with a = t / (1 - t) on every axis.
NestedQuadrature nested_tanh_sinh(const ChartIntegrand& f, std::size_t refinements,
                                  double outer_tol, double inner_tol) {
  using boost::math::quadrature::tanh_sinh;
  const int dims = f.dims;
  std::vector<tanh_sinh<double>> integrators;
  integrators.reserve(static_cast<std::size_t>(dims));
  for (int d = 0; d < dims; ++d) integrators.emplace_back(refinements);
  std::vector<double> point(static_cast<std::size_t>(dims));
  NestedQuadrature out;

  std::function<double(int)> integrate_axis = [&](int axis) -> double {
    // Boost passes the signed distance to the nearer endpoint; use it as
    // 1 - t on the right half, where it keeps precision near t = 1.
    auto g = [&](double t, double tc) -> double {
      const double rest = tc > 0 ? tc : 1.0 - t;
      if (rest <= 0) return 0.0;
      point[axis] = t / rest;
      const double jacobian = 1.0 / (rest * rest);
      double v;
      if (axis + 1 == dims) {
        ++out.evaluations;
        v = f(point) * jacobian;
      } else {
        v = integrate_axis(axis + 1) * jacobian;
      }
      return std::isfinite(v) ? v : 0.0;
    };
    double err = 0, l1 = 0;
    std::size_t levels = 0;
    const double value = integrators[axis].integrate(g, 0.0, 1.0, axis == 0 ? outer_tol : inner_tol,
                                                     &err, &l1, &levels);
    if (axis == 0) out.outer_error = err;
    return value;
  };
  out.value = integrate_axis(0);
  return out;
}

NumericResult integrate_quadrature(const ChartIntegrand& f, const NumericBudget& budget) {
  const double tight = std::sqrt(std::numeric_limits<double>::epsilon());
  const double outer_tol = std::min(tight, 0.1 * budget.tolerance);
  const NestedQuadrature fine = nested_tanh_sinh(f, budget.max_refinements, outer_tol, tight);
  NumericResult result;
  result.estimate = fine.value;
  result.evaluations = fine.evaluations;
  if (f.dims > 1) {
    // The inner error is estimated from a rerun with looser inner tolerance.
    const NestedQuadrature coarse =
        nested_tanh_sinh(f, budget.max_refinements, outer_tol, std::sqrt(tight));
    result.evaluations += coarse.evaluations;
    result.error = fine.outer_error + std::abs(fine.value - coarse.value);
  } else {
    result.error = fine.outer_error;
  }
  return result;
}

NumericResult integrate_monte_carlo(const ChartIntegrand& f, const NumericBudget& budget) {
  constexpr std::uint64_t kChunk = 1 << 16;
  constexpr std::size_t kBlock = 1024;
  constexpr double kWarp = 3.0;
  const std::size_t dims = static_cast<std::size_t>(f.dims);
  const std::uint64_t chunks = (budget.samples + kChunk - 1) / kChunk;
  const DensePolynomial numerator = to_dense(f.numerator, dims);
  const DensePolynomial psi = to_dense(f.psi, dims);
  const auto& kernel = simd::kernels();
  const double exponent = 0.5 * f.psi_half;

  struct Moments {
    double sum = 0, sum_sq = 0;
  };
  std::vector<Moments> moments(chunks);
  parallel_for(chunks, [&](std::size_t c) {
    std::seed_seq seq{budget.seed, static_cast<std::uint64_t>(c)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t count = std::min<std::uint64_t>(kChunk, budget.samples - begin);
    std::vector<double> points(dims * kBlock), weights(kBlock), num(kBlock), den(kBlock);
    Moments acc;
    for (std::uint64_t done = 0; done < count; done += kBlock) {
      const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kBlock, count - done));
      std::fill(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t v = 0; v < dims; ++v) {
          const double u = uniform(rng);
          const double r = u / (1.0 - u);
          points[v * kBlock + k] = std::pow(r, kWarp);
          // d/du (u/(1-u))^s = s r^{s-1} / (1-u)^2
          weights[k] *= kWarp * std::pow(r, kWarp - 1.0) / ((1.0 - u) * (1.0 - u));
        }
      kernel.evaluate_batch(numerator.view(), points.data(), kBlock, n, num.data());
      kernel.evaluate_batch(psi.view(), points.data(), kBlock, n, den.data());
      for (std::size_t k = 0; k < n; ++k) {
        double v = f.prefactor * num[k] * weights[k] / std::pow(den[k], exponent);
        if (!std::isfinite(v)) v = 0.0;
        acc.sum += v;
        acc.sum_sq += v * v;
      }
    }
    moments[c] = acc;
  });
  Moments total;
  for (const auto& m : moments) {
    total.sum += m.sum;
    total.sum_sq += m.sum_sq;
  }
  const double n = static_cast<double>(budget.samples);
  NumericResult result;
  result.estimate = total.sum / n;
  const double variance = std::max(0.0, total.sum_sq / n - result.estimate * result.estimate);
  result.error = std::sqrt(variance / n);
  result.evaluations = budget.samples;
  return result;
}

}  // namespace

NumericResult integrate_dipole_numeric(int i, IntegrationScheme scheme, const NumericBudget& budget) {
  if (budget.tolerance <= 0) throw std::invalid_argument("tolerance must be positive");
  if (scheme == IntegrationScheme::monte_carlo && budget.samples == 0)
    throw std::invalid_argument("sample budget must be positive");
  const ChartIntegrand f = dipole_chart_integrand(i);
  const NumericResult result = scheme == IntegrationScheme::quadrature
                                   ? integrate_quadrature(f, budget)
                                   : integrate_monte_carlo(f, budget);
  if (!(result.error <= budget.tolerance)) {
    std::ostringstream os;
    os << "integration budget exhausted: error estimate " << result.error << " exceeds tolerance "
       << budget.tolerance;
    throw BudgetExhausted(os.str(), result);
  }
  return result;
}

NumericResult integrate_dipole_numeric(int i, IntegrationScheme scheme) {
  return integrate_dipole_numeric(i, scheme, default_budget(scheme));
}

}  // namespace graphforms
