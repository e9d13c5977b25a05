#include "graphforms/serialize.hpp"

#include <sstream>

namespace graphforms {

Document to_document(const FormExpression& f) {
  Document d;
  d["expression"] = f.to_string();
  d["scalar"] = f.scalar().to_string();
  d["pi_power"] = f.pi_power();
  d["psi_half_power"] = f.psi_half();
  if (auto deg = f.degree()) d["degree"] = *deg;
  else d["degree"] = nullptr;
  d["psi"] = f.psi().to_string();
  return d;
}

Document to_document(const IntMatrix& m) {
  Document rows = Document::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Document row = Document::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Document to_document(const Check& c) {
  Document d;
  d["name"] = c.name;
  d["passed"] = c.passed;
  if (!c.detail.empty()) d["detail"] = c.detail;
  return d;
}

Document to_document(const IdentityReport& r) {
  Document checks = Document::array();
  for (const auto& c : r.checks) checks.push_back(to_document(c));
  return checks;
}

Document to_document(const FormReport& r) {
  Document d;
  d["subject"] = r.subject;
  d["graph"] = r.graph_fingerprint;
  d["loop_number"] = r.loop_number;
  d["basis"] = to_document(r.basis);
  d["tree"] = r.tree ? Document(r.tree->to_string()) : Document(nullptr);
  Document forms;
  for (const auto& [name, form] : r.forms) forms[name] = to_document(form);
  d["forms"] = forms.is_null() ? Document::object() : forms;
  d["checks"] = to_document(r.checks);
  d["ratio"] = r.ratio ? Document(r.ratio->to_string()) : Document(nullptr);
  Document notes = Document::array();
  for (const auto& n : r.notes) notes.push_back(n);
  d["notes"] = notes;
  d["passed"] = r.all_passed();
  return d;
}

Document to_document(const NumericResult& r) {
  Document d;
  d["estimate"] = r.estimate;
  d["error"] = r.error;
  d["evaluations"] = r.evaluations;
  return d;
}

namespace {

bool is_inline(const Document& d) {
  if (d.is_primitive()) return true;
  if (d.is_array()) {
    for (const auto& x : d)
      if (!(x.is_primitive() || (x.is_array() && is_inline(x)))) return false;
    return true;
  }
  return d.empty();
}

std::string scalar_text(const Document& d) {
  if (d.is_string()) return d.get<std::string>();
  if (d.is_null()) return "none";
  if (d.is_boolean()) return d.get<bool>() ? "yes" : "no";
  if (d.is_array()) {
    std::string s = "[";
    bool first = true;
    for (const auto& x : d) {
      if (!first) s += ", ";
      first = false;
      s += scalar_text(x);
    }
    return s + "]";
  }
  if (d.is_object()) return "{}";
  return d.dump();
}

void render(const Document& d, int indent, std::ostringstream& os);

void render_value(const std::string& key, const Document& v, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (is_inline(v)) {
    os << pad << key << ": " << scalar_text(v) << '\n';
    return;
  }
  os << pad << key << ":\n";
  render(v, indent + 2, os);
}

void render(const Document& d, int indent, std::ostringstream& os) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  if (d.is_object()) {
    for (const auto& [k, v] : d.items()) render_value(k, v, indent, os);
  } else if (d.is_array()) {
    for (const auto& item : d) {
      if (is_inline(item)) {
        os << pad << "- " << scalar_text(item) << '\n';
        continue;
      }
      // First field shares the bullet line.
      std::ostringstream inner;
      render(item, indent + 2, inner);
      std::string text = inner.str();
      text.replace(static_cast<std::size_t>(indent), 2, "- ");
      os << text;
    }
  } else {
    os << pad << scalar_text(d) << '\n';
  }
}

}  // namespace

std::string render_text(const Document& doc) {
  std::ostringstream os;
  render(doc, 0, os);
  return os.str();
}

std::string render_json(const Document& doc) { return doc.dump(2) + "\n"; }

}  // namespace graphforms
