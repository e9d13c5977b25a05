#include "graphforms/simd/kernels.hpp"

namespace graphforms::simd::scalar {

bool add_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  bool ok = true;
  for (std::size_t i = 0; i < kExponentWidth; ++i) {
    unsigned s = unsigned{a[i]} + unsigned{b[i]};
    ok &= s <= 255u;
    out[i] = static_cast<std::uint8_t>(s);
  }
  return ok;
}

bool divide_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  bool ok = true;
  for (std::size_t i = 0; i < kExponentWidth; ++i) {
    ok &= a[i] <= b[i];
    out[i] = static_cast<std::uint8_t>(b[i] - a[i]);
  }
  return ok;
}

unsigned exponent_degree(const std::uint8_t* a) {
  unsigned d = 0;
  for (std::size_t i = 0; i < kExponentWidth; ++i) d += a[i];
  return d;
}

void evaluate_batch(const DensePolynomialView& poly, const double* points, std::size_t stride,
                    std::size_t count, double* out) {
  const std::size_t nv = poly.num_vars;
  for (std::size_t k = 0; k < count; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t < poly.coefficients.size(); ++t) {
      double term = poly.coefficients[t];
      const std::uint8_t* e = poly.exponents.data() + t * nv;
      for (std::size_t v = 0; v < nv; ++v) {
        const double x = points[v * stride + k];
        for (unsigned p = 0; p < e[v]; ++p) term = term * x;
      }
      acc = acc + term;
    }
    out[k] = acc;
  }
}

}  // namespace graphforms::simd::scalar
