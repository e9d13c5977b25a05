#include "cli_app.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "graphforms/forms_engine.hpp"
#include "graphforms/serialize.hpp"

namespace graphforms::cli {

namespace {

/// Bad user input; reported with exit status 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Outcome {
  Document doc;
  bool passed = true;
};

Graph load_graph(const RunConfig& c) {
  if (c.graph_path.empty()) throw InputError("a graph file is required");
  std::string text;
  if (c.graph_path == "-") {
    text.assign(std::istreambuf_iterator<char>(std::cin), {});
  } else {
    std::ifstream in(c.graph_path);
    if (!in) throw InputError("cannot read " + c.graph_path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  Graph g = c.format == "text"   ? parse_graph_text(text)
            : c.format == "json" ? parse_graph_json(text)
                                 : parse_graph(text);
  if (g.num_edges() > c.max_edges)
    throw InputError("graph has " + std::to_string(g.num_edges()) + " edges, above --max-edges");
  return g;
}

IntMatrix parse_basis(const Graph& g, const std::string& text) {
  // Accepts [[1,0],[0,1]] or "1,0;0,1"; rows are edges, columns are cycles.
  std::vector<std::vector<std::int64_t>> rows;
  const auto first = text.find_first_not_of(" \t");
  if (first != std::string::npos && text[first] == '[') {
    Document doc;
    try {
      doc = Document::parse(text);
      rows = doc.get<std::vector<std::vector<std::int64_t>>>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed --basis: ") + e.what());
    }
  } else {
    std::stringstream all(text);
    std::string row;
    while (std::getline(all, row, ';')) {
      std::vector<std::int64_t> values;
      std::stringstream cells(row);
      std::string cell;
      while (std::getline(cells, cell, ',')) {
        try {
          std::size_t used = 0;
          values.push_back(std::stoll(cell, &used));
          if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw InputError("malformed --basis entry '" + cell + "'");
        }
      }
      rows.push_back(std::move(values));
    }
  }
  if (static_cast<int>(rows.size()) != g.num_edges())
    throw InputError("--basis needs one row per edge");
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  IntMatrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw InputError("--basis rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

CycleBasis choose_basis(const Graph& g, const RunConfig& c) {
  if (c.basis && c.tree) throw InputError("--tree and --basis are mutually exclusive");
  if (c.basis) {
    try {
      return CycleBasis::from_columns(g, parse_basis(g, *c.basis), false);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("invalid cycle basis: ") + e.what());
    }
  }
  if (c.tree) {
    const EdgeSet t = EdgeSet::parse(*c.tree);
    if (!is_spanning_tree(g, t)) throw InputError("--tree " + t.to_string() + " is not a spanning tree");
    return fundamental_cycle_basis(g, t);
  }
  return default_cycle_basis(g);
}

void require_loop_cap(const Graph& g, const RunConfig& c) {
  if (g.loop_number() > c.max_loops)
    throw InputError("loop number " + std::to_string(g.loop_number()) + " is above --max-loops " +
                     std::to_string(c.max_loops));
}

Document header(const std::string& command, const Graph& g) {
  Document d;
  d["command"] = command;
  d["graph"] = fingerprint(g);
  d["edges"] = g.num_edges();
  d["vertices"] = g.num_vertices();
  d["loop_number"] = g.loop_number();
  return d;
}

Document notes_for(const Graph& g) {
  Document notes = Document::array();
  if (g.loop_number() % 2 == 1) notes.push_back("odd loop number: the form vanishes");
  if (g.has_self_loop()) notes.push_back("graph has a self-loop");
  return notes;
}

std::string poly_text(const MultiPoly& p) { return p.to_string(); }

Outcome cmd_symanzik(const RunConfig& c) {
  const Graph g = load_graph(c);
  const CycleBasis basis = choose_basis(g, c);
  const MultiPoly trees = symanzik(g, SymanzikMethod::trees);
  const MultiPoly expanded = symanzik(g, SymanzikMethod::expanded_det);
  const MultiPoly cycles = symanzik(g, SymanzikMethod::cycle_det, &basis);
  const std::string method = c.method.empty() ? "trees" : c.method;
  const MultiPoly& chosen = method == "expanded" ? expanded : method == "cycle" ? cycles : trees;
  Outcome o{header("symanzik", g)};
  o.doc["method"] = method;
  o.doc["psi"] = poly_text(chosen);
  IdentityReport r;
  r.add("spanning trees = det of expanded Laplacian", trees == expanded);
  r.add("spanning trees = det of cycle Laplacian", trees == cycles);
  o.doc["checks"] = to_document(r);
  o.passed = r.all_passed();
  return o;
}

std::vector<int> parse_indices(const Graph& g, const std::vector<std::string>& items, bool& has_vertex) {
  std::vector<int> out;
  for (const auto& raw : items) {
    std::string s = raw;
    bool vertex = false;
    if (!s.empty() && (s[0] == 'v' || s[0] == 'V')) {
      vertex = true;
      s.erase(0, 1);
    } else if (!s.empty() && (s[0] == 'e' || s[0] == 'E')) {
      s.erase(0, 1);
    }
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      throw InputError("malformed index '" + raw + "'");
    }
    if (vertex) {
      has_vertex = true;
      if (k < 1 || k > g.num_vertices()) throw InputError("vertex " + raw + " out of range");
      try {
        out.push_back(expanded_index_of_vertex(g, k));
      } catch (const std::invalid_argument&) {
        throw InputError("vertex " + raw + " is v_star and has no row in the expanded Laplacian");
      }
    } else {
      if (k < 1 || k > g.num_edges()) throw InputError("edge " + raw + " out of range");
      out.push_back(k);
    }
  }
  return out;
}

Outcome cmd_dodgson(const RunConfig& c) {
  const Graph g = load_graph(c);
  bool has_vertex = false;
  const auto a = parse_indices(g, c.dodgson_a, has_vertex);
  const auto b = parse_indices(g, c.dodgson_b, has_vertex);
  if (a.size() != b.size()) throw InputError("--a and --b must have the same length");
  MultiPoly value;
  try {
    value = dodgson(g, a, b, DodgsonMethod::det);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  Outcome o{header("dodgson", g)};
  o.doc["rows_removed"] = a;
  o.doc["columns_removed"] = b;
  o.doc["dodgson"] = poly_text(value);
  IdentityReport r;
  if (!has_vertex)
    r.add("determinant = spanning-forest expansion", value == dodgson(g, a, b, DodgsonMethod::expansion));
  o.doc["checks"] = to_document(r);
  o.passed = r.all_passed();
  return o;
}

Document poly_matrix_doc(const PolyMatrix& m) {
  Document rows = Document::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Document row = Document::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).to_string());
    rows.push_back(std::move(row));
  }
  return rows;
}

Outcome cmd_laplacians(const RunConfig& c) {
  const Graph g = load_graph(c);
  const CycleBasis basis = choose_basis(g, c);
  const LaplacianBundle bundle = laplacian_bundle(g, basis);
  Outcome o{header("laplacians", g)};
  o.doc["v_star"] = g.v_star();
  o.doc["incidence_matrix"] = to_document(incidence_matrix(g));
  o.doc["cycle_basis"] = to_document(basis.matrix());
  o.doc["tree"] = basis.tree() ? Document(basis.tree()->to_string()) : Document(nullptr);
  o.doc["path_matrix"] = to_document(path_matrix(g));
  o.doc["cycle_laplacian"] = poly_matrix_doc(bundle.Lambda);
  o.doc["vertex_laplacian_times"] = poly_text(bundle.L_scale);
  o.doc["vertex_laplacian_cleared"] = poly_matrix_doc(bundle.L_cleared);
  o.doc["psi"] = poly_text(symanzik(g));
  IdentityReport r;
  r.add("det of cycle Laplacian = psi", determinant(bundle.Lambda) == symanzik(g));
  o.doc["checks"] = to_document(r);
  o.passed = r.all_passed();
  return o;
}

Outcome cmd_alpha(const RunConfig& c) {
  const Graph g = load_graph(c);
  require_loop_cap(g, c);
  Outcome o{header("alpha", g)};
  o.doc["alpha"] = to_document(alpha_form(g));
  o.doc["notes"] = notes_for(g);
  return o;
}

Outcome cmd_phi(const RunConfig& c) {
  const Graph g = load_graph(c);
  const CycleBasis basis = choose_basis(g, c);
  const std::string method = c.method.empty() ? "direct" : c.method;
  if (method == "trees") require_loop_cap(g, c);
  Outcome o{header("phi", g)};
  o.doc["method"] = method;
  o.doc["basis"] = to_document(basis.matrix());
  o.doc["phi"] = to_document(
      phi_form(g, basis, method == "trees" ? PhiMethod::dodgson_trees : PhiMethod::direct));
  o.doc["notes"] = notes_for(g);
  return o;
}

FormReport identity_report(std::string subject, const Graph& g, const CycleBasis& basis,
                           IdentityReport checks) {
  FormReport r;
  r.subject = std::move(subject);
  r.graph_fingerprint = fingerprint(g);
  r.loop_number = g.loop_number();
  r.basis = basis.matrix();
  r.tree = basis.tree();
  r.checks = std::move(checks);
  return r;
}

FormReport route_report(const Graph& g, const CycleBasis& basis) {
  IdentityReport r;
  const MultiPoly psi = symanzik(g);
  r.add("psi: spanning trees = det of expanded Laplacian",
        psi == symanzik(g, SymanzikMethod::expanded_det));
  r.add("psi: spanning trees = det of cycle Laplacian",
        psi == symanzik(g, SymanzikMethod::cycle_det, &basis));
  int mismatches = 0, pairs = 0;
  for (int i = 1; i <= g.num_edges(); ++i)
    for (int j = i; j <= g.num_edges(); ++j) {
      const int x[] = {i};
      const int y[] = {j};
      ++pairs;
      if (dodgson(g, x, y) != dodgson(g, x, y, DodgsonMethod::expansion)) ++mismatches;
    }
  r.add("edge Dodgson polynomials: determinant = expansion", mismatches == 0,
        std::to_string(pairs) + " pairs, " + std::to_string(mismatches) + " mismatches");
  return identity_report("route agreement", g, basis, std::move(r));
}

Outcome cmd_verify(const RunConfig& c) {
  const Graph g = load_graph(c);
  const CycleBasis basis = choose_basis(g, c);
  const std::string& suite = c.suite;
  const bool all = suite == "all";
  std::vector<FormReport> reports;
  if (all || suite == "main") {
    require_loop_cap(g, c);
    reports.push_back(route_report(g, basis));
    reports.push_back(verify_main_theorem(g, basis));
  }
  if (all || suite == "laplacian") {
    DodgsonCache cache(g);
    reports.push_back(identity_report("Laplacian inverse identities", g, basis,
                                      inverse_entries_via_dodgson(g, basis, &cache)));
  }
  if (all || suite == "signs") {
    DodgsonCache cache(g);
    const IntMatrix pathm = path_matrix(g);
    IdentityReport r = concatenated_det_identities(g, basis, pathm, &cache);
    try {
      r.add("det[C|P] = +-1 for every path matrix", true,
            "det[C|P] = " + std::to_string(sign_factor(g, basis, pathm)));
    } catch (const std::exception& e) {
      r.add("det[C|P] = +-1 for every path matrix", false, e.what());
    }
    reports.push_back(identity_report("sign identities", g, basis, std::move(r)));
  }
  if (all || suite == "forms") {
    require_loop_cap(g, c);
    reports.push_back(property_checks(g, basis));
    if (g.num_edges() < 32)
      for (int e = 1; e <= g.num_edges(); ++e) reports.push_back(subdivision_check(g, basis, e));
  }
  Outcome o{header("verify", g)};
  o.doc["suite"] = suite;
  Document docs = Document::array();
  for (const auto& r : reports) {
    docs.push_back(to_document(r));
    o.passed = o.passed && r.all_passed();
  }
  o.doc["reports"] = docs;
  int total = 0, failed = 0;
  for (const auto& r : reports)
    for (const auto& ch : r.checks.checks) {
      ++total;
      if (!ch.passed) ++failed;
    }
  o.doc["checks_run"] = total;
  o.doc["checks_failed"] = failed;
  Document failures = Document::array();
  for (const auto& r : reports)
    for (const auto& ch : r.checks.checks)
      if (!ch.passed) failures.push_back(r.subject + ": " + ch.name);
  o.doc["failures"] = failures;
  o.doc["passed"] = o.passed;
  return o;
}

Outcome cmd_dipole(const RunConfig& c) {
  if (c.dipole_i < 1) throw InputError("--i must be positive");
  const int i = c.dipole_i;
  const Graph g = dipole_graph(2 * i + 1);
  if (g.num_edges() > c.max_edges) throw InputError("dipole is above --max-edges");
  const CycleBasis basis = dipole_basis(g);
  const FormExpression closed = dipole_phi(i);
  Outcome o{header("dipole", g)};
  o.doc["i"] = i;
  o.doc["closed_form"] = to_document(closed);
  IdentityReport r;
  r.add("closed form = Pfaffian route", forms_equal(closed, phi_form(g, basis)));
  if (g.loop_number() <= c.max_loops)
    r.add("closed form = spanning-tree route",
          forms_equal(closed, phi_form(g, basis, PhiMethod::dodgson_trees)));
  r.add("form degree = 2i", closed.degree() == 2 * i);

  if (c.integrate) {
    const IntegrationScheme scheme =
        c.scheme == "monte_carlo" ? IntegrationScheme::monte_carlo : IntegrationScheme::quadrature;
    NumericBudget budget = default_budget(scheme);
    budget.tolerance = c.tolerance.value_or(scheme == IntegrationScheme::quadrature ? 1e-3 : 2e-2);
    if (c.samples) budget.samples = *c.samples;
    budget.seed = c.seed;
    Document integral;
    integral["scheme"] = c.scheme;
    integral["tolerance"] = budget.tolerance;
    if (scheme == IntegrationScheme::monte_carlo) {
      integral["samples"] = budget.samples;
      integral["seed"] = budget.seed;
    }
    try {
      const NumericResult res = integrate_dipole_numeric(i, scheme, budget);
      integral["result"] = to_document(res);
      std::ostringstream detail;
      detail << "estimate " << res.estimate << " +- " << res.error;
      r.add("integral over the positive orthant = 1", std::abs(res.estimate - 1.0) <= budget.tolerance,
            detail.str());
    } catch (const BudgetExhausted& e) {
      integral["result"] = to_document(e.partial());
      r.add("integral over the positive orthant = 1", false, e.what());
    }
    o.doc["integral"] = integral;
  }
  o.doc["checks"] = to_document(r);
  o.passed = r.all_passed();
  return o;
}

Outcome cmd_subdivide(const RunConfig& c) {
  const Graph g = load_graph(c);
  if (c.edge < 1 || c.edge > g.num_edges()) throw InputError("--edge out of range");
  if (g.num_edges() >= 32) throw InputError("subdivision would exceed 32 edges");
  const CycleBasis basis = choose_basis(g, c);
  const Graph sub = subdivide_edge(g, c.edge);
  Outcome o{header("subdivide", g)};
  o.doc["edge"] = c.edge;
  Document lines = Document::array();
  std::istringstream text(to_text(sub));
  for (std::string line; std::getline(text, line);) lines.push_back(line);
  o.doc["subdivided_graph"] = lines;
  o.doc["subdivided_basis"] = to_document(subdivide_basis(sub, basis, c.edge).matrix());
  const FormReport r = subdivision_check(g, basis, c.edge);
  o.doc["report"] = to_document(r);
  o.passed = r.all_passed();
  return o;
}

void add_graph_options(CLI::App* sub, RunConfig& c, bool basis_options = true) {
  sub->add_option("graph", c.graph_path, "Graph file ('-' for standard input)")->required();
  sub->add_option("--format", c.format, "Graph file format")
      ->check(CLI::IsMember({"auto", "text", "json"}));
  if (basis_options) {
    sub->add_option("--tree", c.tree, "Spanning tree for a fundamental cycle basis, e.g. 2,4");
    sub->add_option("--basis", c.basis, "Cycle basis rows per edge, e.g. '1,0;0,1;-1,-1'");
  }
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.max_loops <= 0 || c.max_edges <= 0) throw InputError("size caps must be positive");
    if (c.max_loops > kMaxPermutationLoops)
      throw InputError("--max-loops cannot exceed " + std::to_string(kMaxPermutationLoops));
    Outcome o;
    if (c.subcommand == "symanzik") o = cmd_symanzik(c);
    else if (c.subcommand == "dodgson") o = cmd_dodgson(c);
    else if (c.subcommand == "laplacians") o = cmd_laplacians(c);
    else if (c.subcommand == "alpha") o = cmd_alpha(c);
    else if (c.subcommand == "phi") o = cmd_phi(c);
    else if (c.subcommand == "verify") o = cmd_verify(c);
    else if (c.subcommand == "dipole") o = cmd_dipole(c);
    else if (c.subcommand == "subdivide") o = cmd_subdivide(c);
    else throw InputError("unknown subcommand '" + c.subcommand + "'");
    out << (c.output == "json" ? render_json(o.doc) : render_text(o.doc));
    return o.passed ? kPassed : kCheckFailed;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "error: malformed graph: " << e.what() << '\n';
  } catch (const ValidationError& e) {
    err << "error: invalid graph: " << e.what() << '\n';
  } catch (const LoopLimitError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  }
  return kInputError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Graph polynomials and the topological and Pfaffian forms of graphs"};
  app.require_subcommand(1);
  app.add_option("--output", c.output, "Report format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--max-loops", c.max_loops, "Loop number cap for permutation sums");
  app.add_option("--max-edges", c.max_edges, "Edge count cap");
  app.fallthrough();

  auto* sym = app.add_subcommand("symanzik", "Graph polynomial psi");
  add_graph_options(sym, c);
  sym->add_option("--method", c.method, "trees | expanded | cycle")
      ->check(CLI::IsMember({"trees", "expanded", "cycle"}));

  auto* dod = app.add_subcommand("dodgson", "Dodgson polynomial with rows A and columns B removed");
  add_graph_options(dod, c, false);
  dod->add_option("--a", c.dodgson_a, "Removed rows: edge labels or vK for vertex K")
      ->delimiter(',');
  dod->add_option("--b", c.dodgson_b, "Removed columns: edge labels or vK for vertex K")
      ->delimiter(',');

  auto* lap = app.add_subcommand("laplacians", "Incidence, cycle and Laplacian matrices");
  add_graph_options(lap, c);

  auto* alpha = app.add_subcommand("alpha", "Topological form alpha");
  add_graph_options(alpha, c, false);

  auto* phi = app.add_subcommand("phi", "Pfaffian form phi");
  add_graph_options(phi, c);
  phi->add_option("--method", c.method, "direct | trees")->check(CLI::IsMember({"direct", "trees"}));

  auto* verify = app.add_subcommand("verify", "Run identity suites");
  add_graph_options(verify, c);
  verify->add_option("--suite", c.suite, "main | laplacian | signs | forms | all")
      ->check(CLI::IsMember({"main", "laplacian", "signs", "forms", "all"}));

  auto* dipole = app.add_subcommand("dipole", "Pfaffian form of the dipole with 2i+1 edges");
  dipole->add_option("--i", c.dipole_i, "Index i")->required();
  dipole->add_flag("--integrate", c.integrate, "Integrate numerically on the chart a_{2i+1} = 1");
  dipole->add_option("--scheme", c.scheme, "quadrature | monte_carlo")
      ->check(CLI::IsMember({"quadrature", "monte_carlo"}));
  dipole->add_option("--samples", c.samples, "Monte Carlo sample budget");
  dipole->add_option("--tolerance", c.tolerance, "Accepted deviation and error estimate");

  auto* sub = app.add_subcommand("subdivide", "Subdivide an edge and compare the forms");
  add_graph_options(sub, c);
  sub->add_option("--edge", c.edge, "Edge label")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPassed;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPassed;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  for (auto* s : app.get_subcommands()) {
    c.subcommand = s->get_name();
    if (s->count("--help")) {
      out << s->help();
      return kPassed;
    }
  }
  return run(c, out, err);
}

}  // namespace graphforms::cli
