#include "graphforms/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace graphforms {
namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();
constexpr i128 kMin = std::numeric_limits<std::int64_t>::min();

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(i128 v) {
  if (v > kMax || v <= kMin) throw std::overflow_error("rational arithmetic overflow");
  return static_cast<std::int64_t>(v);
}

// Reduce num/den (den != 0) and store.
void assign(std::int64_t& num_out, std::int64_t& den_out, i128 num, i128 den) {
  if (den == 0) throw std::domain_error("rational division by zero");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_out = narrow(num);
  den_out = narrow(den);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) { assign(num_, den_, num, den); }

Rational Rational::inverse() const {
  if (num_ == 0) throw std::domain_error("inverse of zero");
  return Rational(den_, num_);
}

Rational Rational::pow(int exponent) const {
  if (exponent < 0) return inverse().pow(-exponent);
  Rational result(1);
  Rational base = *this;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    exponent >>= 1;
    if (exponent > 0) base *= base;
  }
  return result;
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = narrow(-static_cast<i128>(num_));
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  if (den_ == 1 && rhs.den_ == 1) {
    std::int64_t out;
    if (__builtin_add_overflow(num_, rhs.num_, &out))
      throw std::overflow_error("rational arithmetic overflow");
    num_ = out;
    return *this;
  }
  i128 n = static_cast<i128>(num_) * rhs.den_ + static_cast<i128>(rhs.num_) * den_;
  i128 d = static_cast<i128>(den_) * rhs.den_;
  assign(num_, den_, n, d);
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  if (den_ == 1 && rhs.den_ == 1) {
    std::int64_t out;
    if (__builtin_mul_overflow(num_, rhs.num_, &out))
      throw std::overflow_error("rational arithmetic overflow");
    num_ = out;
    return *this;
  }
  i128 n = static_cast<i128>(num_) * rhs.num_;
  i128 d = static_cast<i128>(den_) * rhs.den_;
  assign(num_, den_, n, d);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
  i128 n = static_cast<i128>(num_) * rhs.den_;
  i128 d = static_cast<i128>(den_) * rhs.num_;
  assign(num_, den_, n, d);
  return *this;
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
  i128 l = static_cast<i128>(lhs.num_) * rhs.den_;
  i128 r = static_cast<i128>(rhs.num_) * lhs.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&](std::string_view part) {
    std::int64_t v = 0;
    if (!part.empty() && part.front() == '+') part.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size())
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    return v;
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a.is_zero()) return b.abs();
  if (b.is_zero()) return a.abs();
  std::int64_t n = std::gcd(a.num(), b.num());
  i128 l = static_cast<i128>(a.den()) / std::gcd(a.den(), b.den()) * b.den();
  return Rational(n, narrow(l));
}

}  // namespace graphforms
