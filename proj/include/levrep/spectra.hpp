#pragma once

// Closed-form spectra of the two model systems, their smooth counting
// functions, and window-only enumeration of unfolded levels.

#include <cstdint>
#include <optional>
#include <vector>

#include "levrep/ensemble.hpp"

namespace levrep {

/// One member's unfolded levels inside [center - half_width, center + half_width].
/// Levels are non-decreasing; exact ties only occur at non-generic parameters
/// and are reported by find_degeneracy().
struct UnfoldedWindow {
  std::uint64_t member_id = 0;
  double center = 0;
  double half_width = 0;
  std::vector<double> levels;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
};

inline constexpr double kDegeneracyTolerance = 1e-12;

/// Index of the first level whose successor lies within `tolerance`, if any.
std::optional<std::size_t> find_degeneracy(const UnfoldedWindow& window,
                                           double tolerance = kDegeneracyTolerance);

// --- rectangular billiard -------------------------------------------------

/// Dirichlet level (pi/4)(n^2/alpha + m^2 alpha); Weyl area density is 1.
double rectangle_raw_level(std::int64_t n, std::int64_t m, double alpha);

/// Smooth count e - (sqrt(alpha) + 1/sqrt(alpha)) sqrt(e/pi) + 1/4.
double unfold_rectangle(double e, double alpha);

/// Inverse of unfold_rectangle on its increasing branch.
double rectangle_raw_from_unfolded(double x, double alpha);

UnfoldedWindow rectangle_window(double alpha, double energy, double window_width,
                                std::uint64_t member_id);

// --- modified Kepler problem ----------------------------------------------

/// 2 p sqrt(2 beta) + l^2, p >= 0, l >= 1.
double kepler_raw_level(std::int64_t p, std::int64_t l, double beta);

/// Smooth count of the (p, l) lattice below E:
///   E^{3/2} / (3 sqrt(2b)) - E / (4 sqrt(2b)) + sqrt(E)/2 - 1/4.
double unfold_kepler(double e, double beta);

double kepler_raw_from_unfolded(double x, double beta);

UnfoldedWindow kepler_window(double beta, double energy, double window_width,
                             std::uint64_t member_id);

/// Samples the member's parameter and builds its window.
UnfoldedWindow member_window(const EnsembleConfig& config, std::uint64_t member_id);
UnfoldedWindow window_for_parameter(SystemKind system, double parameter, double energy,
                                    double window_width, std::uint64_t member_id);

}  // namespace levrep
