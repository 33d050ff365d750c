#pragma once

// Fan-out of ensemble members over worker threads, fan-in by accumulator merge.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

#include "levrep/spectra.hpp"
#include "levrep/wide_int.hpp"

namespace levrep {

unsigned default_thread_count();

using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

/// Splits members [0, member_count) into `threads` contiguous shards. Each shard
/// builds its own accumulator with make(); shards are merged in shard order.
/// visit(acc, window) must only touch acc.
template <class Acc, class Make, class Visit>
Acc run_ensemble(const EnsembleConfig& config, unsigned threads, Make make, Visit visit,
                 const ProgressFn& progress = {}) {
  config.validate();
  const std::uint64_t n = config.member_count;
  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(threads == 0 ? default_thread_count() : threads, 1, n));
  std::vector<Acc> shards;
  shards.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) shards.push_back(make());

  std::atomic<std::uint64_t> done{0};
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](unsigned w) {
    try {
      const std::uint64_t begin = n * w / workers;
      const std::uint64_t end = n * (w + 1) / workers;
      for (std::uint64_t i = begin; i < end; ++i) {
        visit(shards[w], member_window(config, i));
        const std::uint64_t d = done.fetch_add(1, std::memory_order_relaxed) + 1;
        if (progress && w == 0 && (i - begin) % 4096 == 0) progress(d, n);
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  if (progress) progress(n, n);

  Acc total = std::move(shards.front());
  for (unsigned w = 1; w < workers; ++w) total.merge(shards[w]);
  return total;
}

/// Level-count and degeneracy tally across members.
struct LevelTally {
  std::uint64_t members = 0;
  std::uint64_t levels = 0;
  u128 levels_sq = 0;
  std::uint64_t degenerate_members = 0;

  void add_window(const UnfoldedWindow& window);
  void merge(const LevelTally& other);
  /// Mean levels per unit length, and its standard error.
  double mean_density(double window_width) const;
  double stderr_density(double window_width) const;
};

}  // namespace levrep
