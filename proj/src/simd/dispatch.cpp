#include <cstdlib>
#include <string_view>

#include "graphforms/simd/kernels.hpp"

namespace graphforms::simd {
namespace {

constexpr KernelTable kScalarTable{&scalar::add_exponents, &scalar::divide_exponents,
                                   &scalar::exponent_degree, &scalar::evaluate_batch};
constexpr KernelTable kAvx2Table{&avx2::add_exponents, &avx2::divide_exponents,
                                 &avx2::exponent_degree, &avx2::evaluate_batch};

Backend detect() {
  if (const char* forced = std::getenv("GRAPHFORMS_SIMD")) {
    if (std::string_view(forced) == "scalar") return Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable& kernel_table(Backend backend) {
  return backend == Backend::avx2 ? kAvx2Table : kScalarTable;
}

Backend active_backend() {
  static const Backend backend = detect();
  return backend;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernel_table(active_backend());
  return table;
}

}  // namespace graphforms::simd
