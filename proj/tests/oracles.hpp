#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own numerics except the closed-form unfolding maps, which define
// the coordinates being compared.

#include <cstdint>
#include <random>
#include <vector>

#include "levrep/spectra.hpp"

namespace oracle {

/// Si(x) by Gauss-Kronrod quadrature of sin(t)/t on unit panels.
double sine_integral(double x);

/// Full spectrum below a generous cutoff, unfolded, then filtered to the window.
std::vector<double> rectangle_window_brute(double alpha, double energy, double window_width);
std::vector<double> kepler_window_brute(double beta, double energy, double window_width);

/// Exact number of (p, l) lattice levels with raw energy <= e.
std::uint64_t kepler_count_below(double e, double beta);
std::uint64_t rectangle_count_below(double e, double alpha);

/// Inverse-CDF sampler for the ansatz spacing law, built from a tabulated
/// survival function exp(-s + Si(s t)/pi) with Si integrated by Simpson's rule.
class AnsatzSampler {
public:
  explicit AnsatzSampler(double t_min, double s_max = 40, double step = 1e-4);
  double operator()(std::mt19937_64& rng) const;
  double survival(double s) const;

private:
  double step_;
  std::vector<double> survival_;  // decreasing, survival_[i] at s = i * step
};

/// Unfolded Poisson window: Poisson(W) uniform points on [E - W/2, E + W/2].
levrep::UnfoldedWindow poisson_window(std::mt19937_64& rng, double energy, double window_width,
                                      std::uint64_t member_id = 0);

/// Unit lattice with uniform jitter in [-jitter, jitter] covering the window.
levrep::UnfoldedWindow jittered_lattice_window(std::mt19937_64& rng, double energy,
                                               double window_width, double jitter);

}  // namespace oracle
