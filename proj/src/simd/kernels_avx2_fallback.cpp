// Non-x86 targets: the avx2 entry points forward to the reference kernels so
// the dispatch table stays well-formed. cpu_has_avx2() is false there.

#include "graphforms/simd/kernels.hpp"

namespace graphforms::simd::avx2 {

bool add_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  return scalar::add_exponents(a, b, out);
}
bool divide_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out) {
  return scalar::divide_exponents(a, b, out);
}
unsigned exponent_degree(const std::uint8_t* a) { return scalar::exponent_degree(a); }
void evaluate_batch(const DensePolynomialView& poly, const double* points, std::size_t stride,
                    std::size_t count, double* out) {
  scalar::evaluate_batch(poly, points, stride, count, out);
}

}  // namespace graphforms::simd::avx2
