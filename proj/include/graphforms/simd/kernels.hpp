#pragma once

// Data-parallel inner loops used by the polynomial layer and the numeric
// integrator. Each kernel has a scalar reference implementation and an AVX2
// variant; the active table is chosen once at startup from CPUID and can be
// forced to scalar with GRAPHFORMS_SIMD=scalar.

#include <cstddef>
#include <cstdint>
#include <span>

namespace graphforms::simd {

/// Exponent vectors are fixed-width byte arrays (one byte per variable).
inline constexpr std::size_t kExponentWidth = 32;

enum class Backend { scalar, avx2 };

/// Dense, double-precision view of a polynomial for batched evaluation.
/// `exponents` is row-major, num_terms x num_vars.
struct DensePolynomialView {
  std::size_t num_vars = 0;
  std::span<const double> coefficients;
  std::span<const std::uint8_t> exponents;
};

struct KernelTable {
  /// out = a + b elementwise. Returns false if any lane exceeds 255.
  bool (*add_exponents)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
  /// out = b - a elementwise. Returns false unless a <= b in every lane.
  bool (*divide_exponents)(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
  /// Sum of all lanes.
  unsigned (*exponent_degree)(const std::uint8_t* a);
  /// out[k] = sum_t c_t prod_v points[v * stride + k]^{e_tv} for k < count.
  /// `points` is structure-of-arrays: variable v occupies [v*stride, v*stride+count).
  void (*evaluate_batch)(const DensePolynomialView& poly, const double* points,
                         std::size_t stride, std::size_t count, double* out);
};

namespace scalar {
bool add_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
bool divide_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
unsigned exponent_degree(const std::uint8_t* a);
void evaluate_batch(const DensePolynomialView& poly, const double* points, std::size_t stride,
                    std::size_t count, double* out);
}  // namespace scalar

namespace avx2 {
bool add_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
bool divide_exponents(const std::uint8_t* a, const std::uint8_t* b, std::uint8_t* out);
unsigned exponent_degree(const std::uint8_t* a);
void evaluate_batch(const DensePolynomialView& poly, const double* points, std::size_t stride,
                    std::size_t count, double* out);
}  // namespace avx2

bool cpu_has_avx2();
const KernelTable& kernel_table(Backend backend);
/// Table selected for this process.
const KernelTable& kernels();
Backend active_backend();

}  // namespace graphforms::simd
