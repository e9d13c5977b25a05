#include "graphforms/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace graphforms {
namespace {

void check_index(int index) {
  if (index < 1 || index > Monomial::kMaxVariables)
    throw std::out_of_range("variable index " + std::to_string(index) + " outside 1.." +
                            std::to_string(Monomial::kMaxVariables));
}

bool term_greater(const MultiPoly::Term& lhs, const MultiPoly::Term& rhs) {
  return lhs.first > rhs.first;
}

// Merge two descending term lists, adding rhs scaled by `sign`.
std::vector<MultiPoly::Term> merge_add(const std::vector<MultiPoly::Term>& lhs,
                                       const std::vector<MultiPoly::Term>& rhs, bool negate) {
  std::vector<MultiPoly::Term> out;
  out.reserve(lhs.size() + rhs.size());
  auto i = lhs.begin();
  auto j = rhs.begin();
  while (i != lhs.end() || j != rhs.end()) {
    if (j == rhs.end() || (i != lhs.end() && i->first > j->first)) {
      out.push_back(*i++);
    } else if (i == lhs.end() || j->first > i->first) {
      out.emplace_back(j->first, negate ? -j->second : j->second);
      ++j;
    } else {
      Rational c = negate ? i->second - j->second : i->second + j->second;
      if (!c.is_zero()) out.emplace_back(i->first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monomial

Monomial Monomial::variable(int index, unsigned power) {
  Monomial m;
  m.set_exponent(index, power);
  return m;
}

unsigned Monomial::exponent(int index) const {
  check_index(index);
  return exps_[static_cast<std::size_t>(index - 1)];
}

void Monomial::set_exponent(int index, unsigned power) {
  check_index(index);
  if (power > 255) throw std::overflow_error("monomial exponent exceeds 255");
  auto& slot = exps_[static_cast<std::size_t>(index - 1)];
  degree_ = static_cast<std::uint16_t>(degree_ - slot + power);
  slot = static_cast<std::uint8_t>(power);
}

int Monomial::max_variable() const {
  for (int i = kMaxVariables; i >= 1; --i)
    if (exps_[static_cast<std::size_t>(i - 1)] != 0) return i;
  return 0;
}

Monomial operator*(const Monomial& lhs, const Monomial& rhs) {
  Monomial out;
  if (!simd::kernels().add_exponents(lhs.exps_.data(), rhs.exps_.data(), out.exps_.data()))
    throw std::overflow_error("monomial exponent exceeds 255");
  out.degree_ = static_cast<std::uint16_t>(lhs.degree_ + rhs.degree_);
  return out;
}

std::optional<Monomial> Monomial::divided_by(const Monomial& divisor) const {
  if (divisor.degree_ > degree_) return std::nullopt;
  Monomial out;
  if (!simd::kernels().divide_exponents(divisor.exps_.data(), exps_.data(), out.exps_.data()))
    return std::nullopt;
  out.degree_ = static_cast<std::uint16_t>(degree_ - divisor.degree_);
  return out;
}

std::strong_ordering operator<=>(const Monomial& lhs, const Monomial& rhs) {
  if (auto c = lhs.degree_ <=> rhs.degree_; c != 0) return c;
  int c = std::memcmp(lhs.exps_.data(), rhs.exps_.data(), simd::kExponentWidth);
  return c <=> 0;
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly::MultiPoly(Rational constant) {
  if (!constant.is_zero()) terms_.emplace_back(Monomial{}, constant);
}

MultiPoly MultiPoly::variable(int index) { return monomial(Monomial::variable(index)); }

MultiPoly MultiPoly::monomial(const Monomial& m, Rational coefficient) {
  MultiPoly p;
  if (!coefficient.is_zero()) p.terms_.emplace_back(m, coefficient);
  return p;
}

MultiPoly MultiPoly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(), term_greater);
  MultiPoly p;
  p.terms_.reserve(terms.size());
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().first == t.first) {
      p.terms_.back().second += t.second;
      if (p.terms_.back().second.is_zero()) p.terms_.pop_back();
    } else if (!t.second.is_zero()) {
      p.terms_.push_back(std::move(t));
    }
  }
  return p;
}

bool MultiPoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.front().first.is_one());
}

Rational MultiPoly::constant_term() const {
  if (!terms_.empty() && terms_.back().first.is_one()) return terms_.back().second;
  return Rational(0);
}

Rational MultiPoly::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& key) { return t.first > key; });
  if (it != terms_.end() && it->first == m) return it->second;
  return Rational(0);
}

int MultiPoly::total_degree() const {
  return terms_.empty() ? -1 : static_cast<int>(terms_.front().first.degree());
}

std::optional<int> MultiPoly::homogeneous_degree() const {
  if (terms_.empty()) return 0;
  if (terms_.front().first.degree() != terms_.back().first.degree()) return std::nullopt;
  return static_cast<int>(terms_.front().first.degree());
}

int MultiPoly::max_variable() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, t.first.max_variable());
  return m;
}

unsigned MultiPoly::degree_in(int index) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.exponent(index));
  return d;
}

MultiPoly MultiPoly::operator-() const {
  MultiPoly p = *this;
  for (auto& t : p.terms_) t.second = -t.second;
  return p;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
  if (rhs.terms_.empty()) return *this;
  terms_ = merge_add(terms_, rhs.terms_, false);
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& rhs) {
  if (rhs.terms_.empty()) return *this;
  terms_ = merge_add(terms_, rhs.terms_, true);
  return *this;
}

MultiPoly& MultiPoly::operator*=(const MultiPoly& rhs) { return *this = *this * rhs; }

MultiPoly& MultiPoly::scale(const Rational& factor) {
  if (factor.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= factor;
  return *this;
}

MultiPoly operator*(const MultiPoly& lhs, const MultiPoly& rhs) {
  if (lhs.is_zero() || rhs.is_zero()) return {};
  if (lhs.is_constant()) return MultiPoly(rhs).scale(lhs.terms_.front().second);
  if (rhs.is_constant()) return MultiPoly(lhs).scale(rhs.terms_.front().second);
  // Multiplying by a single term preserves the order, so the product of a
  // monomial with a polynomial needs no sort.
  if (lhs.terms_.size() == 1 || rhs.terms_.size() == 1) {
    const auto& single = lhs.terms_.size() == 1 ? lhs.terms_.front() : rhs.terms_.front();
    const auto& many = lhs.terms_.size() == 1 ? rhs : lhs;
    MultiPoly out;
    out.terms_.reserve(many.terms_.size());
    for (const auto& t : many.terms_)
      out.terms_.emplace_back(single.first * t.first, single.second * t.second);
    return out;
  }
  std::vector<MultiPoly::Term> products;
  products.reserve(lhs.terms_.size() * rhs.terms_.size());
  for (const auto& a : lhs.terms_)
    for (const auto& b : rhs.terms_) products.emplace_back(a.first * b.first, a.second * b.second);
  return MultiPoly::from_terms(std::move(products));
}

MultiPoly MultiPoly::pow(unsigned exponent) const {
  MultiPoly result(1);
  MultiPoly base = *this;
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    exponent >>= 1u;
    if (exponent > 0) base = base * base;
  }
  return result;
}

MultiPoly MultiPoly::partial_derivative(int index) const {
  check_index(index);
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(index);
    if (e == 0) continue;
    Monomial reduced = m;
    reduced.set_exponent(index, e - 1);
    out.emplace_back(reduced, c * Rational(static_cast<std::int64_t>(e)));
  }
  return from_terms(std::move(out));
}

MultiPoly MultiPoly::substitute(int index, const MultiPoly& value) const {
  check_index(index);
  std::vector<MultiPoly> powers{MultiPoly(1)};
  MultiPoly out;
  std::vector<Term> untouched;
  for (const auto& [m, c] : terms_) {
    unsigned e = m.exponent(index);
    if (e == 0) {
      untouched.emplace_back(m, c);
      continue;
    }
    while (powers.size() <= e) powers.push_back(powers.back() * value);
    Monomial rest = m;
    rest.set_exponent(index, 0);
    out += MultiPoly::monomial(rest, c) * powers[e];
  }
  return out + from_terms(std::move(untouched));
}

MultiPoly MultiPoly::substitute_all(std::span<const MultiPoly> images) const {
  const int n = static_cast<int>(images.size());
  if (max_variable() > n)
    throw std::invalid_argument("substitution does not cover variable a" +
                                std::to_string(max_variable()));
  std::vector<std::vector<MultiPoly>> powers(images.size(), std::vector<MultiPoly>{MultiPoly(1)});
  MultiPoly out;
  for (const auto& [m, c] : terms_) {
    MultiPoly term(c);
    for (int v = 1; v <= n; ++v) {
      unsigned e = m.exponent(v);
      if (e == 0) continue;
      auto& pw = powers[static_cast<std::size_t>(v - 1)];
      while (pw.size() <= e) pw.push_back(pw.back() * images[static_cast<std::size_t>(v - 1)]);
      term *= pw[e];
    }
    out += term;
  }
  return out;
}

Rational MultiPoly::evaluate(std::span<const Rational> point) const {
  Rational acc(0);
  for (const auto& [m, c] : terms_) {
    Rational term = c;
    for (int v = 1, top = m.max_variable(); v <= top; ++v) {
      unsigned e = m.exponent(v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) > point.size())
        throw std::invalid_argument("evaluation point too short");
      term *= point[static_cast<std::size_t>(v - 1)].pow(static_cast<int>(e));
    }
    acc += term;
  }
  return acc;
}

double MultiPoly::evaluate(std::span<const double> point) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double term = c.to_double();
    for (int v = 1, top = m.max_variable(); v <= top; ++v) {
      unsigned e = m.exponent(v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) > point.size())
        throw std::invalid_argument("evaluation point too short");
      term *= std::pow(point[static_cast<std::size_t>(v - 1)], static_cast<double>(e));
    }
    acc += term;
  }
  return acc;
}

Rational MultiPoly::content() const {
  Rational g(0);
  for (const auto& t : terms_) g = rational_gcd(g, t.second);
  return g.is_zero() ? Rational(1) : g;
}

std::string MultiPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    const bool negative = c.sign() < 0;
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    const Rational mag = c.abs();
    bool wrote = false;
    if (m.is_one() || mag != Rational(1)) {
      os << mag.to_string();
      wrote = true;
    }
    for (int v = 1, top = m.max_variable(); v <= top; ++v) {
      unsigned e = m.exponent(v);
      if (e == 0) continue;
      if (wrote) os << '*';
      os << 'a' << v;
      if (e > 1) os << '^' << e;
      wrote = true;
    }
  }
  return os.str();
}

MultiPoly MultiPoly::parse(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> MultiPoly {
    throw std::invalid_argument("malformed polynomial at offset " + std::to_string(pos) + " (" +
                                why + "): '" + std::string(text) + "'");
  };
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto read_uint = [&]() -> std::string_view {
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  };

  std::vector<Term> terms;
  skip_ws();
  if (pos == text.size()) return fail("empty");
  int sign = 1;
  while (true) {
    skip_ws();
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      if (text[pos] == '-') sign = -sign;
      ++pos;
      continue;
    }
    Rational coeff(sign);
    Monomial mono;
    bool have_factor = false;
    while (true) {
      skip_ws();
      if (pos < text.size() && text[pos] == 'a') {
        ++pos;
        auto digits = read_uint();
        if (digits.empty()) return fail("variable index");
        int index = std::stoi(std::string(digits));
        unsigned power = 1;
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
          ++pos;
          skip_ws();
          auto p = read_uint();
          if (p.empty()) return fail("exponent");
          power = static_cast<unsigned>(std::stoul(std::string(p)));
        }
        mono = mono * Monomial::variable(index, power);
      } else if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        std::size_t start = pos;
        read_uint();
        if (pos < text.size() && text[pos] == '/') {
          ++pos;
          if (read_uint().empty()) return fail("denominator");
        }
        coeff *= Rational::parse(text.substr(start, pos - start));
      } else {
        return fail("expected factor");
      }
      have_factor = true;
      skip_ws();
      if (pos < text.size() && text[pos] == '*') {
        ++pos;
        continue;
      }
      break;
    }
    if (!have_factor) return fail("empty term");
    terms.emplace_back(mono, coeff);
    sign = 1;
    skip_ws();
    if (pos == text.size()) break;
    if (text[pos] != '+' && text[pos] != '-') return fail("expected '+' or '-'");
  }
  skip_ws();
  if (pos != text.size()) return fail("trailing input");
  return from_terms(std::move(terms));
}

std::ostream& operator<<(std::ostream& os, const MultiPoly& p) { return os << p.to_string(); }

MultiPoly exact_divide(const MultiPoly& a, const MultiPoly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.is_zero()) return {};
  if (b.is_constant()) return MultiPoly(a).scale(b.leading_term().second.inverse());
  const auto& [lead_m, lead_c] = b.leading_term();
  std::vector<MultiPoly::Term> quotient;
  MultiPoly rem = a;
  while (!rem.is_zero()) {
    const auto& [rm, rc] = rem.leading_term();
    auto q = rm.divided_by(lead_m);
    if (!q) throw std::domain_error("polynomial division is not exact");
    Rational qc = rc / lead_c;
    quotient.emplace_back(*q, qc);
    rem -= MultiPoly::monomial(*q, qc) * b;
  }
  // Quotient terms are produced in strictly descending order.
  return MultiPoly::from_terms(std::move(quotient));
}

DensePolynomial to_dense(const MultiPoly& p, std::size_t num_vars) {
  if (static_cast<std::size_t>(p.max_variable()) > num_vars)
    throw std::invalid_argument("polynomial uses more variables than the dense layout");
  DensePolynomial d;
  d.num_vars = num_vars;
  d.coefficients.reserve(p.size());
  d.exponents.reserve(p.size() * num_vars);
  for (const auto& [m, c] : p.terms()) {
    d.coefficients.push_back(c.to_double());
    for (std::size_t v = 1; v <= num_vars; ++v)
      d.exponents.push_back(static_cast<std::uint8_t>(m.exponent(static_cast<int>(v))));
  }
  return d;
}

}  // namespace graphforms
