#pragma once

// Empirical observables of unfolded ensembles: nearest-neighbour spacings,
// the integrated spacing law P(s), level number variance and the smooth
// pair-correlation kernel.
//
// Every ensemble estimator has an accumulator whose state is integer counts.
// Accumulators merge by integer addition, so results do not depend on the
// number of workers or the order in which members are visited.

#include <cstdint>
#include <span>
#include <vector>

#include "levrep/spectra.hpp"
#include "levrep/wide_int.hpp"

namespace levrep {

class StatsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Differences of consecutive in-window levels. Fewer than two levels -> empty.
std::vector<double> nearest_spacings(const UnfoldedWindow& window);

// --- spacing distribution -------------------------------------------------

struct SpacingHistogram {
  std::vector<double> bin_edges;        // size = bins + 1
  std::vector<std::uint64_t> counts;    // per bin
  std::uint64_t total_spacings = 0;     // including those beyond the last edge
  std::vector<double> density;          // counts / (total * width)
  std::vector<double> stderr_density;   // binomial, per bin

  std::size_t bins() const { return counts.size(); }
  double bin_width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double bin_mid(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
};

/// Bins of width `bin_width` over [0, s_max]. Throws StatsError on empty input.
SpacingHistogram spacing_histogram(std::span<const double> spacings, double bin_width,
                                   double s_max);

/// (fraction of spacings <= s) / s. Throws StatsError on empty input.
double cumulative_P(std::span<const double> spacings, double s);

struct CumulativeEstimate {
  double s = 0;
  double value = 0;
  double stderr_value = 0;
  std::uint64_t below = 0;
  std::uint64_t total = 0;
};

class SpacingAccumulator {
public:
  SpacingAccumulator(double bin_width, double s_max, std::vector<double> thresholds = {});

  void add(std::span<const double> spacings);
  void add_window(const UnfoldedWindow& window) { add(nearest_spacings(window)); }
  void merge(const SpacingAccumulator& other);

  std::uint64_t total() const { return total_; }
  SpacingHistogram histogram() const;
  const std::vector<double>& thresholds() const { return thresholds_; }
  CumulativeEstimate cumulative(std::size_t threshold_index) const;

private:
  double bin_width_;
  std::size_t bins_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> thresholds_;
  std::vector<std::uint64_t> below_;
  std::uint64_t total_ = 0;
};

// --- number variance ---------------------------------------------------------

struct VarianceCurve {
  std::vector<double> L_grid;
  std::vector<double> sigma2;
  std::vector<double> stderr_sigma2;
  std::uint64_t member_count = 0;
};

/// Number of levels in [center - L/2, center + L/2].
std::uint64_t count_in_interval(const UnfoldedWindow& window, double L);

class VarianceAccumulator {
public:
  /// Every L must be positive and no larger than the window width.
  VarianceAccumulator(std::vector<double> L_grid, double window_width);

  void add_window(const UnfoldedWindow& window);
  void merge(const VarianceAccumulator& other);
  VarianceCurve curve() const;
  std::uint64_t members() const { return members_; }

private:
  std::vector<double> L_grid_;
  double window_width_;
  std::uint64_t members_ = 0;
  std::vector<std::uint64_t> sum_;
  std::vector<u128> sum_sq_;
};

/// Across-member variance of interval counts; needs >= 2 windows.
VarianceCurve number_variance(std::span<const UnfoldedWindow> windows,
                              std::span<const double> L_grid);

// --- pair correlation --------------------------------------------------------

struct CorrelationEstimate {
  std::vector<double> omega_grid;  // bin centres
  std::vector<double> k_smooth;    // 1 - R2(omega)
  std::vector<double> stderr_k;
};

/// Histogram of |x_i - x_j|, i != j, in bins [w - bin/2, w + bin/2) around each
/// grid point, with reference levels restricted to the window core
/// [lower + w_max, upper - w_max], w_max = max(grid) + bin/2.
class PairAccumulator {
public:
  PairAccumulator(std::vector<double> omega_grid, double bin, double window_width);

  void add_window(const UnfoldedWindow& window);
  void merge(const PairAccumulator& other);
  CorrelationEstimate estimate() const;
  std::uint64_t members() const { return members_; }

private:
  std::vector<double> grid_;
  double bin_;
  double reach_;
  std::uint64_t members_ = 0;
  std::uint64_t refs_ = 0;
  u128 refs_sq_ = 0;
  std::vector<std::uint64_t> pairs_;
  std::vector<u128> pairs_sq_;
  std::vector<u128> pairs_refs_;
  std::vector<std::uint64_t> scratch_;
};

CorrelationEstimate empirical_kernel(std::span<const UnfoldedWindow> windows,
                                     std::span<const double> omega_grid, double bin);

}  // namespace levrep
