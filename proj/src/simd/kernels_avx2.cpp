// Compiled with -mavx2; only reached after a CPUID check.

#include <immintrin.h>

#include "graphforms/simd/kernels.hpp"

namespace graphforms::simd::avx2 {

static_assert(kExponentWidth == 32, "one __m256i per exponent vector");

bool add_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a));
  const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b));
  const __m256i wrapped = _mm256_add_epi8(va, vb);
  const __m256i saturated = _mm256_adds_epu8(va, vb);
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(out), wrapped);
  // Lanes differ exactly where the unsigned sum overflowed.
  const __m256i same = _mm256_cmpeq_epi8(wrapped, saturated);
  return _mm256_movemask_epi8(same) == -1;
}

bool divide_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a));
  const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b));
  _mm256_storeu_si256(reinterpret_cast<__m256i*>(out), _mm256_sub_epi8(vb, va));
  // a <= b  <=>  max(a, b) == b
  const __m256i le = _mm256_cmpeq_epi8(_mm256_max_epu8(va, vb), vb);
  return _mm256_movemask_epi8(le) == -1;
}

unsigned exponent_degree(const std::uint8_t* a) {
  const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a));
  const __m256i sums = _mm256_sad_epu8(va, _mm256_setzero_si256());
  return static_cast<unsigned>(_mm256_extract_epi64(sums, 0) + _mm256_extract_epi64(sums, 1) +
                               _mm256_extract_epi64(sums, 2) + _mm256_extract_epi64(sums, 3));
}

void evaluate_batch(const DensePolynomialView& poly, const double* points, std::size_t stride,
                    std::size_t count, double* out) {
  const std::size_t nv = poly.num_vars;
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t t = 0; t < poly.coefficients.size(); ++t) {
      __m256d term = _mm256_set1_pd(poly.coefficients[t]);
      const std::uint8_t* e = poly.exponents.data() + t * nv;
      for (std::size_t v = 0; v < nv; ++v) {
        if (e[v] == 0) continue;
        const __m256d x = _mm256_loadu_pd(points + v * stride + k);
        for (unsigned p = 0; p < e[v]; ++p) term = _mm256_mul_pd(term, x);
      }
      acc = _mm256_add_pd(acc, term);
    }
    _mm256_storeu_pd(out + k, acc);
  }
  if (k < count) {
    // Tail through the reference path; points are addressed relative to k.
    scalar::evaluate_batch(poly, points + k, stride, count - k, out + k);
  }
}

}  // namespace graphforms::simd::avx2
