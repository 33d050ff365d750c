#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "levrep/simd/kernels.hpp"

namespace levrep::simd {

namespace {

Isa detect() {
  if (const char* env = std::getenv("LEVREP_SIMD"); env && std::string(env) == "scalar")
    return Isa::Scalar;
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(LEVREP_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::runtime_error("instruction set " + std::string(to_string(isa)) + " is not available");
  current().store(isa, std::memory_order_relaxed);
}

double lattice_row_sum(double a, std::span<const double> b, double k, double L) {
#if defined(LEVREP_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::lattice_row_sum(a, b, k, L);
#endif
  return scalar::lattice_row_sum(a, b, k, L);
}

double sin_sum(std::span<const double> w, std::span<const double> t, double x) {
#if defined(LEVREP_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::sin_sum(w, t, x);
#endif
  return scalar::sin_sum(w, t, x);
}

}  // namespace levrep::simd
