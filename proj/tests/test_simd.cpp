#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "levrep/simd/kernels.hpp"

using namespace levrep;

namespace {

double naive_row(double a, const std::vector<double>& b, double k, double L) {
  long double sum = 0;
  for (double bj : b) {
    const double q = a + bj;
    const double s = std::sin(k * std::sqrt(q) * L / 2);
    sum += 2 * s * s / (q * std::sqrt(q));
  }
  return static_cast<double>(sum);
}

double naive_sin_sum(const std::vector<double>& w, const std::vector<double>& t, double x) {
  long double sum = 0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * std::sin(t[i] * x);
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("scalar kernels match naive sums") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 50);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 31u, 1000u}) {
    std::vector<double> b(n), w(n), t(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = u(rng) * u(rng);
      w[i] = u(rng) - 25;
      t[i] = u(rng);
    }
    CHECK(simd::scalar::lattice_row_sum(0.3, b, 0.035, 7.5) ==
          doctest::Approx(naive_row(0.3, b, 0.035, 7.5)).epsilon(1e-12));
    CHECK(simd::scalar::sin_sum(w, t, 1.7) == doctest::Approx(naive_sin_sum(w, t, 1.7)).epsilon(1e-12));
  }
}

TEST_CASE("avx2 kernels equal the scalar reference") {
  if (!simd::isa_available(simd::Isa::Avx2)) {
    MESSAGE("AVX2 not available on this CPU; skipped");
    return;
  }
  std::mt19937_64 rng(11);
  for (double scale : {1e-3, 1.0, 1e3, 1e6}) {
    std::uniform_real_distribution<double> u(0, scale);
    for (std::size_t n : {1u, 2u, 5u, 8u, 13u, 16u, 17u, 257u, 4099u}) {
      std::vector<double> b(n), w(n), t(n);
      for (std::size_t i = 0; i < n; ++i) {
        b[i] = u(rng) + 1e-6;
        w[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
        t[i] = u(rng);
      }
      for (double L : {0.5, 3.0, 49.0}) {
        const double ref = simd::scalar::lattice_row_sum(0.25, b, 0.0354, L);
        const double vec = simd::avx2::lattice_row_sum(0.25, b, 0.0354, L);
        CHECK(std::abs(vec - ref) <= 1e-12 * std::abs(ref) + 1e-300);
      }
      for (double x : {-3.3, 0.01, 2.0, 40.0}) {
        double abs_sum = 0;
        for (double wi : w) abs_sum += std::abs(wi);
        const double ref = simd::scalar::sin_sum(w, t, x);
        const double vec = simd::avx2::sin_sum(w, t, x);
        CHECK(std::abs(vec - ref) <= 1e-13 * abs_sum);
      }
    }
  }
}

TEST_CASE("avx2 sine stays accurate over a wide argument range") {
  if (!simd::isa_available(simd::Isa::Avx2)) return;
  std::vector<double> w{1.0}, t{1.0};
  for (double x = -1e5; x <= 1e5; x += 12.345) {
    CHECK(simd::avx2::sin_sum(w, t, x) == doctest::Approx(std::sin(x)).epsilon(1e-14).scale(1));
  }
}

TEST_CASE("dispatch can be forced") {
  const simd::Isa before = simd::active_isa();
  simd::force_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  if (simd::isa_available(simd::Isa::Avx2)) {
    simd::force_isa(simd::Isa::Avx2);
    CHECK(simd::active_isa() == simd::Isa::Avx2);
  } else {
    CHECK_THROWS(simd::force_isa(simd::Isa::Avx2));
  }
  simd::force_isa(before);
  CHECK(simd::to_string(simd::Isa::Avx2) == "avx2");
}
