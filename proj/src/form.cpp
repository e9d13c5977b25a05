#include "graphforms/form.hpp"

#include <bit>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace graphforms {

std::vector<int> mask_labels(EdgeMask mask) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(std::popcount(mask)));
  while (mask != 0) {
    out.push_back(std::countr_zero(mask) + 1);
    mask &= mask - 1;
  }
  return out;
}

EdgeMask mask_of(std::span<const int> labels) {
  EdgeMask m = 0;
  for (int e : labels) {
    if (e < 1 || e > 32) throw std::out_of_range("edge label outside 1..32");
    const EdgeMask bit = EdgeMask{1} << (e - 1);
    if (m & bit) throw std::invalid_argument("repeated edge label in wedge monomial");
    m |= bit;
  }
  return m;
}

bool MaskOrder::operator()(EdgeMask lhs, EdgeMask rhs) const {
  const int pl = std::popcount(lhs);
  const int pr = std::popcount(rhs);
  if (pl != pr) return pl < pr;
  if (lhs == rhs) return false;
  // Equal sizes: the set holding the lowest differing label comes first.
  const EdgeMask lowest = (lhs ^ rhs) & (~(lhs ^ rhs) + 1);
  return (lhs & lowest) != 0;
}

int wedge_sign(EdgeMask s, EdgeMask t) {
  if (s & t) return 0;
  int inversions = 0;
  for (EdgeMask rest = t; rest != 0; rest &= rest - 1) {
    const int bit = std::countr_zero(rest);
    inversions += std::popcount(bit == 31 ? EdgeMask{0} : s >> (bit + 1));
  }
  return inversions % 2 == 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// DiffForm

DiffForm::DiffForm(MultiPoly function) {
  if (!function.is_zero()) terms_.emplace(EdgeMask{0}, std::move(function));
}

DiffForm DiffForm::term(EdgeMask mask, MultiPoly coefficient) {
  DiffForm f;
  if (!coefficient.is_zero()) f.terms_.emplace(mask, std::move(coefficient));
  return f;
}

DiffForm DiffForm::basis(int edge) {
  if (edge < 1 || edge > 32) throw std::out_of_range("edge label outside 1..32");
  return term(EdgeMask{1} << (edge - 1), MultiPoly(1));
}

DiffForm DiffForm::differential(const MultiPoly& p) {
  DiffForm f;
  for (int v = 1, top = p.max_variable(); v <= top; ++v) {
    MultiPoly dp = p.partial_derivative(v);
    if (!dp.is_zero()) f.terms_.emplace(EdgeMask{1} << (v - 1), std::move(dp));
  }
  return f;
}

std::optional<int> DiffForm::degree() const {
  if (terms_.empty()) return 0;
  const int d = std::popcount(terms_.begin()->first);
  for (const auto& [mask, _] : terms_)
    if (std::popcount(mask) != d) return std::nullopt;
  return d;
}

bool DiffForm::is_even() const {
  for (const auto& [mask, _] : terms_)
    if (std::popcount(mask) % 2 != 0) return false;
  return true;
}

MultiPoly DiffForm::coefficient(EdgeMask mask) const {
  auto it = terms_.find(mask);
  return it == terms_.end() ? MultiPoly() : it->second;
}

DiffForm DiffForm::operator-() const {
  DiffForm out = *this;
  for (auto& [_, p] : out.terms_) p = -p;
  return out;
}

DiffForm& DiffForm::operator+=(const DiffForm& rhs) {
  for (const auto& [mask, p] : rhs.terms_) {
    auto [it, inserted] = terms_.try_emplace(mask, p);
    if (inserted) continue;
    it->second += p;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

DiffForm& DiffForm::operator-=(const DiffForm& rhs) {
  for (const auto& [mask, p] : rhs.terms_) {
    auto [it, inserted] = terms_.try_emplace(mask, -p);
    if (inserted) continue;
    it->second -= p;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

DiffForm& DiffForm::scale(const Rational& factor) {
  if (factor.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [_, p] : terms_) p.scale(factor);
  return *this;
}

DiffForm& DiffForm::multiply(const MultiPoly& function) {
  if (function.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [_, p] : terms_) p *= function;
  return *this;
}

DiffForm operator*(const DiffForm& lhs, const DiffForm& rhs) {
  DiffForm out;
  for (const auto& [ms, ps] : lhs.terms_)
    for (const auto& [mt, pt] : rhs.terms_) {
      const int sign = wedge_sign(ms, mt);
      if (sign == 0) continue;
      MultiPoly prod = ps * pt;
      if (sign < 0) prod = -prod;
      out += DiffForm::term(ms | mt, std::move(prod));
    }
  return out;
}

DiffForm DiffForm::exterior_derivative() const {
  DiffForm out;
  for (const auto& [mask, p] : terms_) out += differential(p) * term(mask, MultiPoly(1));
  return out;
}

DiffForm DiffForm::pullback(std::span<const MultiPoly> images) const {
  std::vector<DiffForm> dimages;
  dimages.reserve(images.size());
  for (const auto& img : images) dimages.push_back(differential(img));
  DiffForm out;
  for (const auto& [mask, p] : terms_) {
    DiffForm piece(p.substitute_all(images));
    for (int e : mask_labels(mask)) {
      if (static_cast<std::size_t>(e) > images.size())
        throw std::invalid_argument("pullback image list too short");
      piece = piece * dimages[static_cast<std::size_t>(e - 1)];
    }
    out += piece;
  }
  return out;
}

namespace {

std::string mask_text(EdgeMask mask) {
  std::string s = "da{";
  bool first = true;
  for (int e : mask_labels(mask)) {
    if (!first) s += ',';
    s += std::to_string(e);
    first = false;
  }
  return s + '}';
}

}  // namespace

std::string DiffForm::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [mask, p] : terms_) {
    if (!first) out += " + ";
    out += '(' + p.to_string() + ')';
    if (mask != 0) out += ' ' + mask_text(mask);
    first = false;
  }
  return out;
}

bool is_commuting_element(const DiffForm& f) { return f.is_even(); }

// ---------------------------------------------------------------------------
// FormExpression

FormExpression::FormExpression(Rational scalar, int pi_power, int psi_half, MultiPoly psi,
                               int num_vars, DiffForm numerator)
    : scalar_(scalar),
      pi_power_(pi_power),
      psi_half_(psi_half),
      psi_(std::move(psi)),
      num_vars_(num_vars),
      numerator_(std::move(numerator)) {
  if (psi_half_ < 0) throw std::invalid_argument("negative psi power");
  if (psi_.is_zero()) throw std::invalid_argument("ambient psi must be non-zero");
  canonicalize();
}

FormExpression FormExpression::zero(MultiPoly psi, int num_vars) {
  return FormExpression(Rational(0), 0, 0, std::move(psi), num_vars, DiffForm());
}

void FormExpression::canonicalize() {
  if (scalar_.is_zero()) numerator_ = DiffForm();
  if (numerator_.is_zero()) {
    scalar_ = Rational(0);
    pi_power_ = 0;
    psi_half_ = 0;
    return;
  }
  if (psi_ == MultiPoly(1)) psi_half_ = 0;
  Rational g(0);
  for (const auto& [_, p] : numerator_.terms())
    for (const auto& t : p.terms()) g = rational_gcd(g, t.second);
  // Leading coefficient of the first term made positive.
  const Rational lead = numerator_.terms().begin()->second.leading_term().second;
  if (lead.sign() < 0) g = -g;
  if (g != Rational(1)) {
    numerator_.scale(g.inverse());
    scalar_ *= g;
  }
}

std::optional<int> FormExpression::doubled_weight() const {
  const int dpsi = psi_.total_degree();
  std::optional<int> w;
  for (const auto& [mask, p] : numerator_.terms()) {
    auto hd = p.homogeneous_degree();
    if (!hd) return std::nullopt;
    const int here = 2 * (*hd + std::popcount(mask)) - psi_half_ * dpsi;
    if (w && *w != here) return std::nullopt;
    w = here;
  }
  return w.value_or(0);
}

FormExpression FormExpression::scaled(const Rational& factor, int extra_pi_power) const {
  return FormExpression(scalar_ * factor, pi_power_ + extra_pi_power, psi_half_, psi_, num_vars_,
                        numerator_);
}

FormExpression FormExpression::exterior_derivative() const {
  // d(N psi^{-k/2}) = (1/2) (2 psi dN - k dpsi ^ N) / psi^{(k+2)/2}
  DiffForm dn = numerator_.exterior_derivative();
  dn.multiply(psi_);
  dn.scale(Rational(2));
  DiffForm corr = DiffForm::differential(psi_) * numerator_;
  corr.scale(Rational(psi_half_));
  return FormExpression(scalar_ * Rational(1, 2), pi_power_, psi_half_ + 2, psi_, num_vars_,
                        dn - corr);
}

FormExpression FormExpression::pullback(std::span<const MultiPoly> images, int target_vars) const {
  return FormExpression(scalar_, pi_power_, psi_half_, psi_.substitute_all(images), target_vars,
                        numerator_.pullback(images));
}

void require_same_ambient(const FormExpression& lhs, const FormExpression& rhs) {
  if (lhs.num_vars() != rhs.num_vars() || !(lhs.psi() == rhs.psi()))
    throw std::invalid_argument("forms live over different graphs");
}

FormExpression wedge(const FormExpression& lhs, const FormExpression& rhs) {
  require_same_ambient(lhs, rhs);
  if (lhs.is_zero() || rhs.is_zero()) return FormExpression::zero(lhs.psi_, lhs.num_vars_);
  return FormExpression(lhs.scalar_ * rhs.scalar_, lhs.pi_power_ + rhs.pi_power_,
                        lhs.psi_half_ + rhs.psi_half_, lhs.psi_, lhs.num_vars_,
                        lhs.numerator_ * rhs.numerator_);
}

namespace {

/// psi^{n/2} for even n as a polynomial.
MultiPoly psi_power(const MultiPoly& psi, int doubled) { return psi.pow(static_cast<unsigned>(doubled / 2)); }

}  // namespace

FormExpression operator+(const FormExpression& lhs, const FormExpression& rhs) {
  require_same_ambient(lhs, rhs);
  if (lhs.is_zero()) return rhs;
  if (rhs.is_zero()) return lhs;
  if (lhs.pi_power_ != rhs.pi_power_)
    throw std::invalid_argument("sum of forms with different powers of pi");
  if ((lhs.psi_half_ - rhs.psi_half_) % 2 != 0)
    throw std::invalid_argument("sum of forms with psi powers of different parity");
  const int k = std::max(lhs.psi_half_, rhs.psi_half_);
  DiffForm a = lhs.numerator_;
  a.multiply(psi_power(lhs.psi_, k - lhs.psi_half_)).scale(lhs.scalar_);
  DiffForm b = rhs.numerator_;
  b.multiply(psi_power(rhs.psi_, k - rhs.psi_half_)).scale(rhs.scalar_);
  return FormExpression(Rational(1), lhs.pi_power_, k, lhs.psi_, lhs.num_vars_, a + b);
}

std::string FormExpression::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  os << '(' << scalar_.to_string() << ") * pi^(" << pi_power_ << ") * [ " << numerator_.to_string()
     << " ] / psi^(" << psi_half_ << "/2)";
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const FormExpression& f) { return os << f.to_string(); }

namespace {

/// Brings both numerators (with scalars) to the common denominator
/// psi^{k/2}; nullopt when the parities differ and psi is not 1.
std::optional<std::pair<DiffForm, DiffForm>> cross_multiplied(const FormExpression& lhs,
                                                              const FormExpression& rhs) {
  const bool trivial_psi = lhs.psi() == MultiPoly(1);
  if (!trivial_psi && (lhs.psi_half() - rhs.psi_half()) % 2 != 0) return std::nullopt;
  DiffForm a = lhs.numerator();
  DiffForm b = rhs.numerator();
  if (!trivial_psi) {
    const int k = std::max(lhs.psi_half(), rhs.psi_half());
    a.multiply(psi_power(lhs.psi(), k - lhs.psi_half()));
    b.multiply(psi_power(rhs.psi(), k - rhs.psi_half()));
  }
  a.scale(lhs.scalar());
  b.scale(rhs.scalar());
  return std::make_pair(std::move(a), std::move(b));
}

}  // namespace

bool forms_equal(const FormExpression& lhs, const FormExpression& rhs) {
  require_same_ambient(lhs, rhs);
  if (lhs.is_zero() || rhs.is_zero()) return lhs.is_zero() && rhs.is_zero();
  if (lhs.pi_power() != rhs.pi_power()) return false;
  // A multilinear non-constant psi is never a perfect square, so odd
  // half-powers cannot cancel against even ones.
  auto pair = cross_multiplied(lhs, rhs);
  return pair && pair->first == pair->second;
}

std::string ScaleRatio::to_string() const {
  std::string s = factor.to_string();
  if (pi_power != 0) s += " * pi^(" + std::to_string(pi_power) + ")";
  return s;
}

std::optional<ScaleRatio> scale_ratio(const FormExpression& lhs, const FormExpression& rhs) {
  require_same_ambient(lhs, rhs);
  if (rhs.is_zero()) return std::nullopt;
  if (lhs.is_zero()) return ScaleRatio{Rational(0), 0};
  const int dpi = lhs.pi_power() - rhs.pi_power();
  auto pair = cross_multiplied(lhs, rhs);
  if (!pair) return std::nullopt;
  const auto& [a, b] = *pair;
  const auto& [mask, pb] = *b.terms().begin();
  const MultiPoly pa = a.coefficient(mask);
  if (pa.is_zero()) return std::nullopt;
  const Rational c = pa.leading_term().second / pb.leading_term().second;
  DiffForm scaled_b = b;
  scaled_b.scale(c);
  if (!(scaled_b == a)) return std::nullopt;
  return ScaleRatio{c, dpi};
}

}  // namespace graphforms
