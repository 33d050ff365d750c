#pragma once

// Data-parallel trigonometric reductions used by the analytic models.
//
// Each kernel has a scalar reference (libm) and, on x86-64, an AVX2/FMA
// variant with its own vectorised sin/cos. The variant is picked once at
// runtime from CPUID; LEVREP_SIMD=scalar in the environment forces the
// reference path.

#include <span>
#include <string_view>

namespace levrep::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
/// Overrides the runtime choice (tests, benchmarking). Throws if unavailable.
void force_isa(Isa isa);

/// One row of the rectangle number-variance lattice sum:
///   sum_j 2 sin^2(k sqrt(q_j) L / 2) / q_j^{3/2},  q_j = a + b[j] > 0.
double lattice_row_sum(double a, std::span<const double> b, double k, double L);
/// sum_i w[i] * sin(t[i] * x)
double sin_sum(std::span<const double> w, std::span<const double> t, double x);

namespace scalar {
double lattice_row_sum(double a, std::span<const double> b, double k, double L);
double sin_sum(std::span<const double> w, std::span<const double> t, double x);
}  // namespace scalar

namespace avx2 {
double lattice_row_sum(double a, std::span<const double> b, double k, double L);
double sin_sum(std::span<const double> w, std::span<const double> t, double x);
}  // namespace avx2

}  // namespace levrep::simd
