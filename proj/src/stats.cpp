#include "levrep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace levrep {

std::vector<double> nearest_spacings(const UnfoldedWindow& window) {
  const auto& x = window.levels;
  std::vector<double> out;
  if (x.size() < 2) return out;
  out.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) out.push_back(x[i] - x[i - 1]);
  return out;
}

// --- spacings ----------------------------------------------------------------

SpacingAccumulator::SpacingAccumulator(double bin_width, double s_max,
                                       std::vector<double> thresholds)
    : bin_width_(bin_width), thresholds_(std::move(thresholds)) {
  if (!(bin_width > 0)) throw StatsError("bin width must be positive");
  if (!(s_max >= bin_width)) throw StatsError("s_max must be at least one bin width");
  bins_ = static_cast<std::size_t>(std::llround(s_max / bin_width));
  if (static_cast<double>(bins_) * bin_width < s_max * (1 - 1e-12)) ++bins_;
  counts_.assign(bins_, 0);
  for (const double s : thresholds_)
    if (!(s > 0)) throw StatsError("cumulative thresholds must be positive");
  below_.assign(thresholds_.size(), 0);
}

void SpacingAccumulator::add(std::span<const double> spacings) {
  for (const double s : spacings) {
    ++total_;
    const double pos = s / bin_width_;
    if (pos >= 0 && pos < static_cast<double>(bins_)) ++counts_[static_cast<std::size_t>(pos)];
    for (std::size_t k = 0; k < thresholds_.size(); ++k)
      if (s <= thresholds_[k]) ++below_[k];
  }
}

void SpacingAccumulator::merge(const SpacingAccumulator& other) {
  if (other.bins_ != bins_ || other.bin_width_ != bin_width_ || other.thresholds_ != thresholds_)
    throw StatsError("cannot merge spacing accumulators with different layouts");
  total_ += other.total_;
  for (std::size_t i = 0; i < bins_; ++i) counts_[i] += other.counts_[i];
  for (std::size_t k = 0; k < below_.size(); ++k) below_[k] += other.below_[k];
}

SpacingHistogram SpacingAccumulator::histogram() const {
  if (total_ == 0) throw StatsError("cannot normalise a histogram of zero spacings");
  SpacingHistogram h;
  h.total_spacings = total_;
  h.counts = counts_;
  h.bin_edges.resize(bins_ + 1);
  for (std::size_t i = 0; i <= bins_; ++i) h.bin_edges[i] = bin_width_ * static_cast<double>(i);
  h.density.resize(bins_);
  h.stderr_density.resize(bins_);
  const double n = static_cast<double>(total_);
  for (std::size_t i = 0; i < bins_; ++i) {
    const double p = static_cast<double>(counts_[i]) / n;
    h.density[i] = p / bin_width_;
    h.stderr_density[i] = std::sqrt(p * (1 - p) / n) / bin_width_;
  }
  return h;
}

CumulativeEstimate SpacingAccumulator::cumulative(std::size_t k) const {
  if (k >= thresholds_.size()) throw StatsError("unknown cumulative threshold");
  if (total_ == 0) throw StatsError("cumulative estimate needs at least one spacing");
  CumulativeEstimate c;
  c.s = thresholds_[k];
  c.below = below_[k];
  c.total = total_;
  const double f = static_cast<double>(c.below) / static_cast<double>(c.total);
  c.value = f / c.s;
  c.stderr_value = std::sqrt(f * (1 - f) / static_cast<double>(c.total)) / c.s;
  return c;
}

SpacingHistogram spacing_histogram(std::span<const double> spacings, double bin_width,
                                   double s_max) {
  if (spacings.empty()) throw StatsError("cannot histogram an empty spacing sample");
  SpacingAccumulator acc(bin_width, s_max);
  acc.add(spacings);
  return acc.histogram();
}

double cumulative_P(std::span<const double> spacings, double s) {
  if (spacings.empty()) throw StatsError("cumulative_P needs at least one spacing");
  if (!(s > 0)) throw StatsError("s must be positive");
  const auto below = std::count_if(spacings.begin(), spacings.end(), [s](double v) { return v <= s; });
  return static_cast<double>(below) / static_cast<double>(spacings.size()) / s;
}

// --- number variance -------------------------------------------------------------

std::uint64_t count_in_interval(const UnfoldedWindow& window, double L) {
  const auto& x = window.levels;
  const auto lo = std::lower_bound(x.begin(), x.end(), window.center - L / 2);
  const auto hi = std::upper_bound(lo, x.end(), window.center + L / 2);
  return static_cast<std::uint64_t>(hi - lo);
}

VarianceAccumulator::VarianceAccumulator(std::vector<double> L_grid, double window_width)
    : L_grid_(std::move(L_grid)), window_width_(window_width) {
  for (const double L : L_grid_) {
    if (!(L > 0)) throw StatsError("interval widths must be positive");
    if (L > window_width * (1 + 1e-12))
      throw StatsError("interval width " + std::to_string(L) + " exceeds the window width");
  }
  sum_.assign(L_grid_.size(), 0);
  sum_sq_.assign(L_grid_.size(), 0);
}

void VarianceAccumulator::add_window(const UnfoldedWindow& window) {
  if (2 * window.half_width < window_width_ * (1 - 1e-12))
    throw StatsError("window narrower than the accumulator was configured for");
  ++members_;
  for (std::size_t k = 0; k < L_grid_.size(); ++k) {
    const std::uint64_t c = count_in_interval(window, L_grid_[k]);
    sum_[k] += c;
    sum_sq_[k] += static_cast<u128>(c) * c;
  }
}

void VarianceAccumulator::merge(const VarianceAccumulator& other) {
  if (other.L_grid_ != L_grid_) throw StatsError("cannot merge variance accumulators with different grids");
  members_ += other.members_;
  for (std::size_t k = 0; k < L_grid_.size(); ++k) {
    sum_[k] += other.sum_[k];
    sum_sq_[k] += other.sum_sq_[k];
  }
}

VarianceCurve VarianceAccumulator::curve() const {
  if (members_ < 2) throw StatsError("number variance needs at least two members");
  VarianceCurve v;
  v.L_grid = L_grid_;
  v.member_count = members_;
  const auto n = static_cast<u128>(members_);
  for (std::size_t k = 0; k < L_grid_.size(); ++k) {
    // N sum c^2 - (sum c)^2 is exact in 128 bits and non-negative.
    const u128 s = sum_[k];
    const u128 scatter = n * sum_sq_[k] - s * s;
    const long double var = static_cast<long double>(scatter) /
                            (static_cast<long double>(members_) * (members_ - 1));
    const double sigma2 = static_cast<double>(var);
    v.sigma2.push_back(sigma2);
    v.stderr_sigma2.push_back(sigma2 * std::sqrt(2.0 / static_cast<double>(members_ - 1)));
  }
  return v;
}

VarianceCurve number_variance(std::span<const UnfoldedWindow> windows,
                              std::span<const double> L_grid) {
  if (windows.size() < 2) throw StatsError("number variance needs at least two members");
  VarianceAccumulator acc({L_grid.begin(), L_grid.end()}, 2 * windows.front().half_width);
  for (const auto& w : windows) acc.add_window(w);
  return acc.curve();
}

// --- pair correlation --------------------------------------------------------------

PairAccumulator::PairAccumulator(std::vector<double> omega_grid, double bin, double window_width)
    : grid_(std::move(omega_grid)), bin_(bin) {
  if (grid_.empty()) throw StatsError("omega grid is empty");
  if (!(bin > 0)) throw StatsError("bin must be positive");
  if (!std::is_sorted(grid_.begin(), grid_.end()))
    throw StatsError("omega grid must be increasing");
  if (grid_.front() - bin / 2 < -1e-12)
    throw StatsError("omega bins must not extend below zero");
  if (grid_.back() + bin > window_width / 2 * (1 + 1e-12))
    throw StatsError("omega grid exceeds half the window width");
  reach_ = grid_.back() + bin / 2;
  pairs_.assign(grid_.size(), 0);
  pairs_sq_.assign(grid_.size(), 0);
  pairs_refs_.assign(grid_.size(), 0);
  scratch_.assign(grid_.size(), 0);
}

void PairAccumulator::add_window(const UnfoldedWindow& window) {
  const auto& x = window.levels;
  const double core_lo = window.lower() + reach_;
  const double core_hi = window.upper() - reach_;
  const double half = bin_ / 2;
  std::fill(scratch_.begin(), scratch_.end(), 0);
  std::uint64_t refs = 0;

  auto bump = [&](double d) {
    // First grid point whose bin [w - b/2, w + b/2) can still hold d.
    auto it = std::upper_bound(grid_.begin(), grid_.end(), d - half);
    for (; it != grid_.end() && *it - half <= d; ++it)
      if (d < *it + half && d >= *it - half) ++scratch_[static_cast<std::size_t>(it - grid_.begin())];
  };

  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < core_lo || x[i] > core_hi) continue;
    ++refs;
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double d = x[j] - x[i];
      if (d >= reach_) break;
      bump(d);
    }
    for (std::size_t j = i; j-- > 0;) {
      const double d = x[i] - x[j];
      if (d >= reach_) break;
      bump(d);
    }
  }

  ++members_;
  refs_ += refs;
  refs_sq_ += static_cast<u128>(refs) * refs;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const std::uint64_t c = scratch_[k];
    pairs_[k] += c;
    pairs_sq_[k] += static_cast<u128>(c) * c;
    pairs_refs_[k] += static_cast<u128>(c) * refs;
  }
}

void PairAccumulator::merge(const PairAccumulator& other) {
  if (other.grid_ != grid_ || other.bin_ != bin_)
    throw StatsError("cannot merge pair accumulators with different grids");
  members_ += other.members_;
  refs_ += other.refs_;
  refs_sq_ += other.refs_sq_;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    pairs_[k] += other.pairs_[k];
    pairs_sq_[k] += other.pairs_sq_[k];
    pairs_refs_[k] += other.pairs_refs_[k];
  }
}

CorrelationEstimate PairAccumulator::estimate() const {
  if (refs_ == 0) throw StatsError("no reference levels in the window core");
  CorrelationEstimate e;
  e.omega_grid = grid_;
  const long double norm = 2.0L * bin_;
  const long double n = static_cast<long double>(members_);
  const long double refs = static_cast<long double>(refs_);
  const long double mean_refs = refs / n;
  for (std::size_t k = 0; k < grid_.size(); ++k) {
    const long double ratio = static_cast<long double>(pairs_[k]) / refs;
    e.k_smooth.push_back(static_cast<double>(1 - ratio / norm));
    // Ratio estimator, clustered by member.
    long double se = 0;
    if (members_ > 1) {
      const long double resid = static_cast<long double>(pairs_sq_[k]) -
                                2 * ratio * static_cast<long double>(pairs_refs_[k]) +
                                ratio * ratio * static_cast<long double>(refs_sq_);
      const long double var = std::max(0.0L, resid) / (n * (n - 1) * mean_refs * mean_refs);
      se = std::sqrt(var) / norm;
    }
    e.stderr_k.push_back(static_cast<double>(se));
  }
  return e;
}

CorrelationEstimate empirical_kernel(std::span<const UnfoldedWindow> windows,
                                     std::span<const double> omega_grid, double bin) {
  if (windows.empty()) throw StatsError("empirical kernel needs at least one member");
  PairAccumulator acc({omega_grid.begin(), omega_grid.end()}, bin, 2 * windows.front().half_width);
  for (const auto& w : windows) acc.add_window(w);
  return acc.estimate();
}

}  // namespace levrep
