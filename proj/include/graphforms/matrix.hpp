#pragma once

// Dense matrices over commutative rings: minors, fraction-free determinants,
// Pfaffians and hafnians. Ring elements only need +, -, *, unary -, ==,
// value-initialisation to zero and construction from the integer 1.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphforms {

template <class R>
concept Ring = std::regular<R> && requires(const R& a, const R& b) {
  { a + b } -> std::convertible_to<R>;
  { a - b } -> std::convertible_to<R>;
  { a * b } -> std::convertible_to<R>;
  { -a } -> std::convertible_to<R>;
  R(1);
};

/// Exact integer quotient; throws when b does not divide a.
inline std::int64_t exact_divide(std::int64_t a, std::int64_t b) {
  if (b == 0) throw std::domain_error("integer division by zero");
  if (a % b != 0) throw std::domain_error("integer division is not exact");
  return a / b;
}

/// Rings with a certified exact division (integral domains). Bareiss
/// elimination is only offered for these.
template <class R>
concept ExactDivisionRing = Ring<R> && requires(const R& a, const R& b) {
  { exact_divide(a, b) } -> std::convertible_to<R>;
};

/// Hook for rings that are only commutative on a subset (e.g. even-degree
/// differential forms). Overloaded next to such types.
template <class R>
bool is_commuting_element(const R&) {
  return true;
}

/// Pivot preference for Bareiss elimination; lower is better. Overloaded for
/// polynomial entries so that unit constants are eliminated first.
inline int pivot_cost(std::int64_t x) { return x == 1 || x == -1 ? 0 : 1; }

template <Ring R>
class RingMatrix {
 public:
  RingMatrix() = default;
  RingMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  RingMatrix(std::size_t rows, std::size_t cols, std::vector<R> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows * cols) throw std::invalid_argument("matrix data size mismatch");
  }
  RingMatrix(std::initializer_list<std::initializer_list<R>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static RingMatrix identity(std::size_t n) {
    RingMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = R(1);
    return m;
  }

  [[nodiscard]] std::size_t rows() const { return rows_; }
  [[nodiscard]] std::size_t cols() const { return cols_; }
  [[nodiscard]] bool is_square() const { return rows_ == cols_; }

  R& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const R& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const R& at(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) throw std::out_of_range("matrix index out of range");
    return (*this)(i, j);
  }

  [[nodiscard]] RingMatrix transpose() const {
    RingMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class F>
  [[nodiscard]] auto map(F&& f) const {
    using Out = std::decay_t<decltype(f(std::declval<const R&>()))>;
    RingMatrix<Out> out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  friend bool operator==(const RingMatrix&, const RingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<R> data_;
};

using IntMatrix = RingMatrix<std::int64_t>;

template <Ring R>
RingMatrix<R> operator+(const RingMatrix<R>& a, const RingMatrix<R>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sum dimension mismatch");
  RingMatrix<R> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

template <Ring R>
RingMatrix<R> operator-(const RingMatrix<R>& a, const RingMatrix<R>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix difference dimension mismatch");
  RingMatrix<R> out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

/// Products keep the factor order a_ik * b_kj, so this is also valid for
/// graded-commutative entries such as 1-forms.
template <Ring R>
RingMatrix<R> operator*(const RingMatrix<R>& a, const RingMatrix<R>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product dimension mismatch");
  const R zero{};
  RingMatrix<R> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const R& aik = a(i, k);
      if (aik == zero) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        const R& bkj = b(k, j);
        if (bkj == zero) continue;
        out(i, j) = out(i, j) + aik * bkj;
      }
    }
  return out;
}

/// Convert entries, e.g. integer incidence data into polynomial matrices.
template <Ring To, Ring From>
RingMatrix<To> convert(const RingMatrix<From>& m) {
  return m.map([](const From& x) { return To(x); });
}

// ---------------------------------------------------------------------------
// Minors. Index sets are 0-based; duplicates are rejected.

enum class MinorMode { remove, keep };

namespace detail {

inline std::vector<std::size_t> validated(std::span<const std::size_t> idx, std::size_t bound,
                                          const char* what) {
  std::vector<std::size_t> v(idx.begin(), idx.end());
  std::sort(v.begin(), v.end());
  if (std::adjacent_find(v.begin(), v.end()) != v.end())
    throw std::invalid_argument(std::string("duplicate ") + what + " index in minor");
  if (!v.empty() && v.back() >= bound)
    throw std::out_of_range(std::string(what) + " index out of range in minor");
  return v;
}

inline std::vector<std::size_t> complement(const std::vector<std::size_t>& sorted,
                                           std::size_t bound) {
  std::vector<std::size_t> out;
  out.reserve(bound - sorted.size());
  auto it = sorted.begin();
  for (std::size_t i = 0; i < bound; ++i) {
    if (it != sorted.end() && *it == i) {
      ++it;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// `remove`: drop rows a and columns b. `keep`: retain exactly rows a and
/// columns b, in their original order.
template <Ring R>
RingMatrix<R> minor(const RingMatrix<R>& m, std::span<const std::size_t> a,
                    std::span<const std::size_t> b, MinorMode mode) {
  auto rs = detail::validated(a, m.rows(), "row");
  auto cs = detail::validated(b, m.cols(), "column");
  if (mode == MinorMode::remove) {
    rs = detail::complement(rs, m.rows());
    cs = detail::complement(cs, m.cols());
  }
  RingMatrix<R> out(rs.size(), cs.size());
  for (std::size_t i = 0; i < rs.size(); ++i)
    for (std::size_t j = 0; j < cs.size(); ++j) out(i, j) = m(rs[i], cs[j]);
  return out;
}

/// M[A] = M[A, -]: keep rows A and all columns.
template <Ring R>
RingMatrix<R> select_rows(const RingMatrix<R>& m, std::span<const std::size_t> rows) {
  std::vector<std::size_t> all(m.cols());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return minor(m, rows, all, MinorMode::keep);
}

/// Horizontal concatenation [A | B].
template <Ring R>
RingMatrix<R> hconcat(const RingMatrix<R>& a, const RingMatrix<R>& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hconcat row mismatch");
  RingMatrix<R> out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Determinants

/// Fraction-free Bareiss elimination with full pivoting. Every division is
/// an exact division certified by the ring (it throws otherwise).
template <ExactDivisionRing R>
R determinant(RingMatrix<R> m) {
  if (!m.is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return R(1);
  const R zero{};
  const R one(1);
  bool negate = false;
  R prev = one;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = n, pc = n;
    int best = 0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j) {
        if (m(i, j) == zero) continue;
        int cost = pivot_cost(m(i, j));
        if (pr == n || cost < best) {
          pr = i;
          pc = j;
          best = cost;
        }
      }
    if (pr == n) return zero;
    if (pr != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pr, j));
      negate = !negate;
    }
    if (pc != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(m(i, k), m(i, pc));
      negate = !negate;
    }
    const R pivot = m(k, k);
    const bool pivot_is_prev = pivot == prev;
    const bool pivot_is_neg_prev = !pivot_is_prev && pivot == -prev;
    for (std::size_t i = k + 1; i < n; ++i) {
      const R lead = m(i, k);
      const bool lead_zero = lead == zero;
      for (std::size_t j = k + 1; j < n; ++j) {
        if (lead_zero) {
          // (pivot * x) / prev without the product when pivot = +-prev.
          if (pivot_is_prev) continue;
          if (pivot_is_neg_prev) {
            m(i, j) = -m(i, j);
            continue;
          }
          if (m(i, j) == zero) continue;
          m(i, j) = exact_divide(pivot * m(i, j), prev);
          continue;
        }
        R num = pivot * m(i, j) - lead * m(k, j);
        m(i, j) = prev == one ? std::move(num) : exact_divide(num, prev);
      }
      m(i, k) = zero;
    }
    prev = pivot;
  }
  return negate ? -m(n - 1, n - 1) : m(n - 1, n - 1);
}

/// Laplace expansion along the first row. Exponential; valid over any
/// commutative ring and used where no exact division is available.
template <Ring R>
R determinant_cofactor(const RingMatrix<R>& m) {
  if (!m.is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  if (n == 0) return R(1);
  if (n == 1) return m(0, 0);
  const R zero{};
  R acc{};
  std::vector<std::size_t> row0{0};
  for (std::size_t j = 0; j < n; ++j) {
    if (m(0, j) == zero) continue;
    std::vector<std::size_t> col{j};
    R sub = m(0, j) * determinant_cofactor(minor(m, row0, col, MinorMode::remove));
    acc = (j % 2 == 0) ? acc + sub : acc - sub;
  }
  return acc;
}

/// adj(M), so that M * adj(M) = det(M) * 1.
template <ExactDivisionRing R>
RingMatrix<R> adjugate(const RingMatrix<R>& m) {
  if (!m.is_square()) throw std::invalid_argument("adjugate of a non-square matrix");
  const std::size_t n = m.rows();
  RingMatrix<R> adj(n, n);
  if (n == 1) {
    adj(0, 0) = R(1);
    return adj;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> r{j}, c{i};
      R cof = determinant(minor(m, r, c, MinorMode::remove));
      adj(i, j) = (i + j) % 2 == 0 ? cof : -cof;
    }
  return adj;
}

// ---------------------------------------------------------------------------
// Pfaffian and hafnian as perfect-matching sums: (2n-1)!! terms.

namespace detail {

template <Ring R>
R matching_sum(const RingMatrix<R>& m, std::vector<std::size_t>& free, bool signed_sum) {
  if (free.empty()) return R(1);
  const R zero{};
  const std::size_t first = free.front();
  R acc{};
  for (std::size_t p = 1; p < free.size(); ++p) {
    const std::size_t partner = free[p];
    const R& entry = m(first, partner);
    if (entry == zero) continue;
    std::vector<std::size_t> rest;
    rest.reserve(free.size() - 2);
    for (std::size_t q = 1; q < free.size(); ++q)
      if (q != p) rest.push_back(free[q]);
    R sub = entry * matching_sum(m, rest, signed_sum);
    // Moving `partner` next to `first` crosses p - 1 indices.
    acc = (!signed_sum || (p - 1) % 2 == 0) ? acc + sub : acc - sub;
  }
  return acc;
}

}  // namespace detail

template <Ring R>
bool is_skew_symmetric(const RingMatrix<R>& m) {
  if (!m.is_square()) return false;
  const R zero{};
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!(m(i, i) == zero)) return false;
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (!(m(i, j) == -m(j, i))) return false;
  }
  return true;
}

template <Ring R>
bool is_symmetric(const RingMatrix<R>& m) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (!(m(i, j) == m(j, i))) return false;
  return true;
}

/// Pf(M) for skew-symmetric M with commuting entries; zero for odd size.
template <Ring R>
R pfaffian(const RingMatrix<R>& m) {
  if (!m.is_square()) throw std::invalid_argument("pfaffian of a non-square matrix");
  if (!is_skew_symmetric(m)) throw std::invalid_argument("pfaffian of a non-skew-symmetric matrix");
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!is_commuting_element(m(i, j)))
        throw std::invalid_argument("pfaffian entries must commute");
  if (m.rows() % 2 == 1) return R{};
  std::vector<std::size_t> free(m.rows());
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = i;
  return detail::matching_sum(m, free, true);
}

/// haf(M) for symmetric M of even size.
template <Ring R>
R hafnian(const RingMatrix<R>& m) {
  if (!m.is_square()) throw std::invalid_argument("hafnian of a non-square matrix");
  if (m.rows() % 2 == 1) throw std::invalid_argument("hafnian of an odd-dimensional matrix");
  if (!is_symmetric(m)) throw std::invalid_argument("hafnian of a non-symmetric matrix");
  std::vector<std::size_t> free(m.rows());
  for (std::size_t i = 0; i < free.size(); ++i) free[i] = i;
  return detail::matching_sum(m, free, false);
}

}  // namespace graphforms
