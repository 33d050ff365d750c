#pragma once

// Parameter recovery: the repulsion period from a spacing histogram, and the
// 1/sqrt(energy) coefficient of P(s) from an energy sweep.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "levrep/stats.hpp"

namespace levrep {

class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct FitResult {
  double parameter = 0;
  double objective = 0;  // weighted sum of squared residuals
  std::int64_t n_points = 0;
  double parameter_stderr = 0;  // curvature proxy
  double bracket_lo = 0;
  double bracket_hi = 0;
  bool at_bracket_edge = false;  // minimum sits on an endpoint: widen the bracket
};

/// Minimises f on [lo, hi] by golden-section search down to `tolerance`.
double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance);

/// Weighted squared residuals between the histogram density and bin averages of
/// the ansatz spacing law at the given t_min. Weights are 1/stderr^2 with the
/// stderr floored at its 10th percentile over bins with nonzero density.
double t_min_objective(const SpacingHistogram& hist, double t_min);

/// Coarse scan (200 points) over [lo, hi], then golden-section refinement to 1e-5.
FitResult fit_t_min(const SpacingHistogram& hist, double lo, double hi);

struct SweepPoint {
  double energy = 0;
  double p_measured = 0;
  double stderr_p = 0;
};

/// Weighted least squares for c in P(e) = P_p(s) - c / sqrt(e). Non-positive
/// stderr on any point switches to unit weights. Needs >= 3 distinct energies.
FitResult fit_sqrt_coefficient(std::span<const SweepPoint> points, double s);

std::string format_fit_report(const FitResult& fit, const std::string& name);

}  // namespace levrep
