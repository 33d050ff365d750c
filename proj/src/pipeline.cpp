#include "levrep/pipeline.hpp"

#include <cmath>

namespace levrep {

unsigned default_thread_count() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

void LevelTally::add_window(const UnfoldedWindow& window) {
  ++members;
  const auto c = static_cast<std::uint64_t>(window.levels.size());
  levels += c;
  levels_sq += static_cast<u128>(c) * c;
  if (find_degeneracy(window)) ++degenerate_members;
}

void LevelTally::merge(const LevelTally& other) {
  members += other.members;
  levels += other.levels;
  levels_sq += other.levels_sq;
  degenerate_members += other.degenerate_members;
}

double LevelTally::mean_density(double window_width) const {
  if (members == 0) return 0;
  return static_cast<double>(levels) / static_cast<double>(members) / window_width;
}

double LevelTally::stderr_density(double window_width) const {
  if (members < 2) return 0;
  const long double n = static_cast<long double>(members);
  const long double mean = static_cast<long double>(levels) / n;
  const long double var = (static_cast<long double>(levels_sq) - n * mean * mean) / (n - 1);
  return static_cast<double>(std::sqrt(std::max(0.0L, var) / n)) / window_width;
}

}  // namespace levrep
