#include "graphforms/graph_polynomials.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace graphforms {
namespace {

int parity_sign(long long n) { return n % 2 == 0 ? 1 : -1; }

MultiPoly signed_poly(int sign, MultiPoly p) { return sign > 0 ? p : -p; }

std::vector<std::size_t> zero_based(std::span<const int> idx) {
  std::vector<std::size_t> out;
  out.reserve(idx.size());
  for (int i : idx) {
    if (i < 1) throw std::out_of_range("expanded Laplacian indices start at 1");
    out.push_back(static_cast<std::size_t>(i - 1));
  }
  return out;
}

/// Visits every k-subset of `pool` (sorted) in lexicographic order.
template <class F>
void for_each_subset(const std::vector<int>& pool, std::size_t k, F&& f) {
  if (k > pool.size()) return;
  std::vector<std::size_t> pos(k);
  std::iota(pos.begin(), pos.end(), 0);
  std::vector<int> chosen(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) chosen[i] = pool[pos[i]];
    f(chosen);
    std::size_t i = k;
    while (i > 0 && pos[i - 1] == pool.size() - k + i - 1) --i;
    if (i == 0) return;
    ++pos[i - 1];
    for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
  }
}

std::int64_t int_det_rows_removed(const IntMatrix& m, const std::vector<int>& removed_labels) {
  std::vector<std::size_t> rows;
  for (int e : removed_labels) rows.push_back(static_cast<std::size_t>(e - 1));
  std::vector<std::size_t> none;
  return determinant(minor(m, rows, none, MinorMode::remove));
}

PolyMatrix dodgson_matrix(DodgsonCache& cache, const std::vector<int>& labels) {
  PolyMatrix out(labels.size(), labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = 0; j < labels.size(); ++j)
      out(i, j) = signed_poly(parity_sign(labels[i] + labels[j]), cache.get(labels[i], labels[j]));
  return out;
}

/// psi^{x,y} for single expanded-Laplacian indices.
MultiPoly vertex_dodgson(const Graph& g, int x, int y) {
  const int xs[] = {x};
  const int ys[] = {y};
  return dodgson(g, xs, ys);
}

std::string matrix_mismatch(const PolyMatrix& lhs, const PolyMatrix& rhs) {
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t j = 0; j < lhs.cols(); ++j)
      if (!(lhs(i, j) == rhs(i, j))) {
        std::ostringstream os;
        os << "entry (" << i + 1 << "," << j + 1 << "): " << lhs(i, j) << " vs " << rhs(i, j);
        return os.str();
      }
  return {};
}

}  // namespace

PolyMatrix to_poly_matrix(const IntMatrix& m) {
  return m.map([](std::int64_t x) { return MultiPoly(Rational(x)); });
}

PolyMatrix edge_variable_matrix(const Graph& g) {
  const auto m = static_cast<std::size_t>(g.num_edges());
  PolyMatrix d(m, m);
  for (std::size_t e = 0; e < m; ++e) d(e, e) = MultiPoly::variable(static_cast<int>(e) + 1);
  return d;
}

PolyMatrix expanded_laplacian(const Graph& g) {
  const auto m = static_cast<std::size_t>(g.num_edges());
  const auto n = static_cast<std::size_t>(g.num_vertices() - 1);
  const IntMatrix inc = incidence_matrix(g);
  PolyMatrix out(m + n, m + n);
  for (std::size_t e = 0; e < m; ++e) {
    out(e, e) = MultiPoly::variable(static_cast<int>(e) + 1);
    for (std::size_t v = 0; v < n; ++v) {
      if (inc(e, v) == 0) continue;
      out(e, m + v) = MultiPoly(Rational(inc(e, v)));
      out(m + v, e) = MultiPoly(Rational(-inc(e, v)));
    }
  }
  return out;
}

int expanded_index_of_vertex(const Graph& g, int v) {
  auto col = g.vertex_column(v);
  if (!col) throw std::invalid_argument("v_star has no row in the expanded Laplacian");
  return g.num_edges() + *col + 1;
}

MultiPoly edge_variable_product(const Graph& g) {
  Monomial m;
  for (int e = 1; e <= g.num_edges(); ++e) m.set_exponent(e, 1);
  return MultiPoly::monomial(m);
}

MultiPoly symanzik(const Graph& g, SymanzikMethod method, const CycleBasis* basis) {
  switch (method) {
    case SymanzikMethod::trees: {
      std::vector<MultiPoly::Term> terms;
      for (const EdgeSet& t : spanning_trees(g)) {
        Monomial m;
        for (int e = 1; e <= g.num_edges(); ++e)
          if (!t.contains(e)) m.set_exponent(e, 1);
        terms.emplace_back(m, Rational(1));
      }
      return MultiPoly::from_terms(std::move(terms));
    }
    case SymanzikMethod::expanded_det:
      return determinant(expanded_laplacian(g));
    case SymanzikMethod::cycle_det: {
      const CycleBasis b = basis ? *basis : default_cycle_basis(g);
      const PolyMatrix c = to_poly_matrix(b.matrix());
      return determinant(PolyMatrix(c.transpose() * edge_variable_matrix(g) * c));
    }
  }
  throw std::invalid_argument("unknown Symanzik method");
}

MultiPoly dodgson(const Graph& g, std::span<const int> a, std::span<const int> b, DodgsonMethod method) {
  if (a.size() != b.size()) throw std::invalid_argument("Dodgson index sets must have equal size");
  const int m = g.num_edges();
  const int dim = m + g.num_vertices() - 1;
  for (int i : a)
    if (i < 1 || i > dim) throw std::out_of_range("Dodgson row index out of range");
  for (int i : b)
    if (i < 1 || i > dim) throw std::out_of_range("Dodgson column index out of range");
  if (method == DodgsonMethod::det) {
    const auto rows = zero_based(a);
    const auto cols = zero_based(b);
    return determinant(minor(expanded_laplacian(g), rows, cols, MinorMode::remove));
  }

  for (int i : a)
    if (i > m) throw std::invalid_argument("the expansion route takes edge indices only");
  for (int i : b)
    if (i > m) throw std::invalid_argument("the expansion route takes edge indices only");
  const EdgeSet sa{std::vector<int>(a.begin(), a.end())};
  const EdgeSet sb{std::vector<int>(b.begin(), b.end())};
  const int ell = g.loop_number();
  if (static_cast<int>(sa.size()) > ell) return MultiPoly();
  std::vector<int> pool;
  for (int e = 1; e <= m; ++e)
    if (!sa.contains(e) && !sb.contains(e)) pool.push_back(e);
  const IntMatrix inc = incidence_matrix(g);
  std::vector<MultiPoly::Term> terms;
  for_each_subset(pool, static_cast<std::size_t>(ell) - sa.size(), [&](const std::vector<int>& u) {
    std::vector<int> ua(u), ub(u);
    ua.insert(ua.end(), sa.begin(), sa.end());
    ub.insert(ub.end(), sb.begin(), sb.end());
    const std::int64_t da = int_det_rows_removed(inc, ua);
    if (da == 0) return;
    const std::int64_t db = int_det_rows_removed(inc, ub);
    if (db == 0) return;
    long long exponent = 0;
    Monomial mono;
    for (int e : u) {
      const auto below_a = std::count_if(sa.begin(), sa.end(), [e](int x) { return x < e; });
      const auto below_b = std::count_if(sb.begin(), sb.end(), [e](int x) { return x < e; });
      exponent += below_a - below_b;
      mono.set_exponent(e, 1);
    }
    terms.emplace_back(mono, Rational(parity_sign(exponent < 0 ? -exponent : exponent) * da * db));
  });
  return MultiPoly::from_terms(std::move(terms));
}

MultiPoly DodgsonCache::get(int i, int j) {
  const std::pair<int, int> key = std::minmax(i, j);
  {
    std::lock_guard lock(mutex_);
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
  }
  const int a[] = {key.first};
  const int b[] = {key.second};
  MultiPoly value = dodgson(graph_, a, b);
  std::lock_guard lock(mutex_);
  return values_.try_emplace(key, std::move(value)).first->second;
}

std::size_t DodgsonCache::size() const {
  std::lock_guard lock(mutex_);
  return values_.size();
}

LaplacianBundle laplacian_bundle(const Graph& g, const CycleBasis& basis) {
  if (basis.matrix().rows() != static_cast<std::size_t>(g.num_edges()))
    throw std::invalid_argument("cycle basis does not match the graph");
  LaplacianBundle b;
  b.D = edge_variable_matrix(g);
  b.I = to_poly_matrix(incidence_matrix(g));
  b.M = expanded_laplacian(g);
  b.L_scale = edge_variable_product(g);
  PolyMatrix scaled_inverse(b.D.rows(), b.D.cols());
  for (int e = 1; e <= g.num_edges(); ++e) {
    Monomial m;
    for (int f = 1; f <= g.num_edges(); ++f)
      if (f != e) m.set_exponent(f, 1);
    scaled_inverse(static_cast<std::size_t>(e - 1), static_cast<std::size_t>(e - 1)) = MultiPoly::monomial(m);
  }
  b.L_cleared = b.I.transpose() * scaled_inverse * b.I;
  const PolyMatrix c = to_poly_matrix(basis.matrix());
  b.Lambda = c.transpose() * b.D * c;
  return b;
}

bool IdentityReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void IdentityReport::add(std::string name, bool passed, std::string detail) {
  checks.push_back({std::move(name), passed, std::move(detail)});
}

void IdentityReport::append(const IdentityReport& other) {
  checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::vector<MultiPoly> relabel_after_removal(int num_edges_after, int removed) {
  std::vector<MultiPoly> images;
  for (int j = 1; j <= num_edges_after; ++j) images.push_back(MultiPoly::variable(j < removed ? j : j + 1));
  return images;
}

IdentityReport inverse_entries_via_dodgson(const Graph& g, const CycleBasis& basis, DodgsonCache* cache) {
  std::optional<DodgsonCache> own;
  if (!cache) cache = &own.emplace(g);
  IdentityReport report;
  const int m = g.num_edges();
  const auto n = static_cast<std::size_t>(g.num_vertices() - 1);
  const LaplacianBundle b = laplacian_bundle(g, basis);
  const MultiPoly psi = symanzik(g);

  // K = psi * L^{-1} predicted from Dodgson polynomials of vertex pairs.
  PolyMatrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      MultiPoly v = signed_poly(parity_sign(static_cast<long long>(i + j)),
                                vertex_dodgson(g, m + static_cast<int>(i) + 1, m + static_cast<int>(j) + 1));
      k(j, i) = v;
      k(i, j) = std::move(v);
    }
  {
    const PolyMatrix lk = b.L_cleared * k;
    const MultiPoly expected = b.L_scale * psi;
    PolyMatrix target(n, n);
    for (std::size_t i = 0; i < n; ++i) target(i, i) = expected;
    std::string detail = matrix_mismatch(lk, target);
    if (!detail.empty() && n > 0) {
      // Report a uniform scalar-matrix discrepancy as a factor.
      bool scalar_matrix = true;
      for (std::size_t i = 0; i < n && scalar_matrix; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i == j ? !(lk(i, j) == lk(0, 0)) : !lk(i, j).is_zero()) scalar_matrix = false;
      if (scalar_matrix) {
        try {
          detail = "global factor " + exact_divide(lk(0, 0), expected).to_string();
        } catch (const std::domain_error&) {
          detail = "diagonal " + lk(0, 0).to_string() + " is not a multiple of psi * prod a_e";
        }
      }
    }
    report.add("vertex Laplacian inverse entries are signed vertex Dodgson polynomials / psi",
               detail.empty(), detail);
  }

  const PolyMatrix c = to_poly_matrix(basis.matrix());
  const PolyMatrix adj_lambda = g.loop_number() > 0 ? adjugate(b.Lambda) : PolyMatrix();
  PolyMatrix edge_dodgson(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
  for (int i = 1; i <= m; ++i)
    for (int j = 1; j <= m; ++j)
      edge_dodgson(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) =
          signed_poly(parity_sign(i + j), cache->get(i, j));

  const PolyMatrix cyc = g.loop_number() > 0 ? PolyMatrix(c * adj_lambda * c.transpose())
                                             : PolyMatrix(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
  {
    std::string detail = matrix_mismatch(cyc, edge_dodgson);
    report.add("C adj(Lambda) C^T equals the signed edge Dodgson matrix", detail.empty(), detail);
  }

  const PolyMatrix iki = b.I * k * b.I.transpose();
  {
    PolyMatrix expected(static_cast<std::size_t>(m), static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i)
      for (int j = 1; j <= m; ++j) {
        const auto r = static_cast<std::size_t>(i - 1), s = static_cast<std::size_t>(j - 1);
        MultiPoly v = -(MultiPoly::variable(i) * MultiPoly::variable(j) * edge_dodgson(r, s));
        if (i == j) v += MultiPoly::variable(i) * psi;
        expected(r, s) = std::move(v);
      }
    std::string detail = matrix_mismatch(iki, expected);
    report.add("I (psi L^{-1}) I^T entries in terms of edge Dodgson polynomials", detail.empty(), detail);
  }

  {
    std::string detail;
    for (int e = 1; e <= m && detail.empty(); ++e) {
      if (g.edge(e).is_self_loop()) continue;
      const Graph contracted = contract_edge(g, e);
      const MultiPoly psi_c = symanzik(contracted).substitute_all(relabel_after_removal(m - 1, e));
      if (!(psi_c == psi.substitute(e, MultiPoly())))
        detail = "edge " + std::to_string(e) + ": contraction differs from a_e = 0";
      else if (!(iki(static_cast<std::size_t>(e - 1), static_cast<std::size_t>(e - 1)) ==
                 MultiPoly::variable(e) * psi_c))
        detail = "edge " + std::to_string(e) + ": diagonal entry differs from a_e psi_{G/e}";
    }
    report.add("diagonal of D^{-1} I L^{-1} I^T equals psi_{G/e} / psi", detail.empty(), detail);
  }

  {
    PolyMatrix lhs = b.D.map([&](const MultiPoly& x) { return x * psi; });
    lhs = lhs - iki;
    const PolyMatrix rhs = b.D * cyc * b.D;
    std::string detail = matrix_mismatch(lhs, rhs);
    report.add("projector decomposition psi D - I K I^T = D C adj(Lambda) C^T D", detail.empty(), detail);
  }

  {
    std::string detail;
    std::size_t trees = 0;
    for (const EdgeSet& t : spanning_trees(g)) {
      ++trees;
      const CycleBasis fb = fundamental_cycle_basis(g, t);
      if (fb.size() == 0) continue;
      const PolyMatrix fc = to_poly_matrix(fb.matrix());
      const PolyMatrix adj = adjugate(PolyMatrix(fc.transpose() * b.D * fc));
      const PolyMatrix expected = dodgson_matrix(*cache, *fb.defining_edges());
      detail = matrix_mismatch(adj, expected);
      if (!detail.empty()) {
        detail = "tree " + t.to_string() + ", " + detail;
        break;
      }
    }
    report.add("fundamental-basis cycle Laplacian inverse via Dodgson polynomials, all " +
                   std::to_string(trees) + " trees",
               detail.empty(), detail);
  }
  return report;
}

IdentityReport concatenated_det_identities(const Graph& g, const CycleBasis& basis, const IntMatrix& pathm,
                                           DodgsonCache* cache) {
  std::optional<DodgsonCache> own;
  if (!cache) cache = &own.emplace(g);
  IdentityReport report;
  const int m = g.num_edges();
  const int ell = g.loop_number();
  const IntMatrix& c = basis.matrix();
  const IntMatrix inc = incidence_matrix(g);
  const MultiPoly psi = symanzik(g);
  const auto trees = spanning_trees(g);

  if (!(pathm.transpose() * inc == IntMatrix::identity(inc.cols())))
    report.add("path matrix satisfies P^T I = 1", false, "P^T I is not the identity");
  if (!(inc.transpose() * c == IntMatrix(inc.cols(), c.cols())))
    report.add("cycle basis satisfies I^T C = 0", false, "I^T C is not zero");

  const std::int64_t sign = determinant(hconcat(c, pathm));
  report.add("det[C|P] is +-1", sign == 1 || sign == -1, "det[C|P] = " + std::to_string(sign));
  {
    const IntMatrix other = path_matrix(g, trees.back());
    const std::int64_t s2 = determinant(hconcat(c, other));
    report.add("det[C|P] is independent of the path matrix", s2 == sign,
               "second path matrix (tree " + trees.back().to_string() + ") gives " + std::to_string(s2));
  }

  const PolyMatrix dc = edge_variable_matrix(g) * to_poly_matrix(c);
  const MultiPoly x = determinant(hconcat(dc, to_poly_matrix(inc)));
  report.add("det[C|D^{-1}I]^2 = psi^2 / prod a_e^2", x * x == psi * psi, "det[DC|I] = " + x.to_string());
  report.add("det[C|P] det[C|D^{-1}I] = psi / prod a_e", MultiPoly(Rational(sign)) * x == psi);
  {
    // Q with Q^T C = 1, supported on the complement of a spanning tree.
    const EdgeSet t = basis.tree() ? *basis.tree() : default_tree(g);
    const EdgeSet cot = t.complement(m);
    IntMatrix q(static_cast<std::size_t>(m), static_cast<std::size_t>(ell));
    if (ell > 0) {
      const IntMatrix sub = select_rows(c, cot.indices());
      const std::int64_t d = determinant(sub);
      const IntMatrix inv_t = adjugate(sub).transpose();
      for (std::size_t i = 0; i < cot.size(); ++i)
        for (std::size_t j = 0; j < static_cast<std::size_t>(ell); ++j)
          q(static_cast<std::size_t>(cot.labels()[i] - 1), j) = inv_t(i, j) * d;
    }
    const bool dual = q.transpose() * c == IntMatrix::identity(static_cast<std::size_t>(ell));
    const MultiPoly y = determinant(hconcat(to_poly_matrix(q), to_poly_matrix(inc)));
    report.add("det[S|D^{-1}I] det[C|D^{-1}I] = psi / prod a_e^2 for S^T D C = 1", dual && y * x == psi,
               dual ? "det[Q|I] = " + y.to_string() : "Q^T C is not the identity");
  }
  {
    const std::int64_t ci = determinant(hconcat(c, inc));
    const auto count = static_cast<std::int64_t>(trees.size());
    report.add("det[C|I] = det[C|P] * number of spanning trees", ci == sign * count,
               std::to_string(ci) + " vs " + std::to_string(sign) + " * " + std::to_string(count));
    const std::vector<Rational> ones(static_cast<std::size_t>(m), Rational(1));
    report.add("psi at a = 1 counts spanning trees", psi.evaluate(std::span<const Rational>(ones)) == Rational(count));
  }
  {
    std::vector<int> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), 1);
    const int global = parity_sign(static_cast<long long>(ell) * (ell + 1) / 2) * static_cast<int>(sign);
    std::string detail;
    std::size_t subsets = 0;
    for_each_subset(all, static_cast<std::size_t>(g.num_vertices() - 1), [&](const std::vector<int>& tl) {
      ++subsets;
      if (!detail.empty()) return;
      const EdgeSet t(tl);
      const EdgeSet cot = t.complement(m);
      const std::int64_t lhs = determinant(select_rows(inc, t.indices()));
      const std::int64_t rhs = global * parity_sign(cot.label_sum()) * determinant(select_rows(c, cot.indices()));
      if (lhs != rhs)
        detail = "T = " + t.to_string() + ": " + std::to_string(lhs) + " vs " + std::to_string(rhs);
    });
    report.add("det I[T] = (-1)^{l(l+1)/2} det[C|P] (-1)^{sum of T-bar} det C[T-bar] for all " +
                   std::to_string(subsets) + " subsets",
               detail.empty(), detail);
  }
  {
    std::string detail;
    for (int e = 1; e <= m && detail.empty(); ++e) {
      const Edge& ed = g.edge(e);
      if (ed.is_self_loop()) continue;
      const MultiPoly lhs = MultiPoly::variable(e) *
                            symanzik(contract_edge(g, e)).substitute_all(relabel_after_removal(m - 1, e));
      MultiPoly rhs;
      const bool s_star = ed.tail == g.v_star(), t_star = ed.head == g.v_star();
      const int s = s_star ? 0 : expanded_index_of_vertex(g, ed.tail);
      const int t = t_star ? 0 : expanded_index_of_vertex(g, ed.head);
      if (!s_star) rhs += vertex_dodgson(g, s, s);
      if (!t_star) rhs += vertex_dodgson(g, t, t);
      if (!s_star && !t_star) {
        MultiPoly cross = vertex_dodgson(g, s, t);
        cross.scale(Rational(2 * parity_sign(s + t)));
        rhs -= cross;
      }
      if (!(lhs == rhs)) detail = "edge " + std::to_string(e) + ": " + lhs.to_string() + " vs " + rhs.to_string();
    }
    report.add("a_e psi_{G/e} = psi^{s,s} + psi^{t,t} - 2 (-1)^{s+t} psi^{s,t}", detail.empty(), detail);
  }
  {
    std::string detail;
    for (int col = 0; col < ell && detail.empty(); ++col)
      for (int i = 1; i <= m && detail.empty(); ++i) {
        MultiPoly acc = psi;
        acc.scale(Rational(c(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(col))));
        for (int j = 1; j <= m; ++j) {
          const std::int64_t cj = c(static_cast<std::size_t>(j - 1), static_cast<std::size_t>(col));
          if (cj == 0) continue;
          MultiPoly term = MultiPoly::variable(j) * cache->get(i, j);
          term.scale(Rational(cj * parity_sign(i + j)));
          acc -= term;
        }
        if (!acc.is_zero())
          detail = "cycle " + std::to_string(col + 1) + ", edge " + std::to_string(i) + ": residue " + acc.to_string();
      }
    report.add("cycle relation c_i psi = sum_j (-1)^{i+j} c_j a_j psi^{i,j}", detail.empty(), detail);
  }
  return report;
}

}  // namespace graphforms
