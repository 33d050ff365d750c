#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "levrep/spectra.hpp"
#include "oracles.hpp"

using namespace levrep;
constexpr double kPi = std::numbers::pi;

TEST_CASE("rectangle raw levels") {
  CHECK(rectangle_raw_level(1, 1, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-15));
  CHECK(rectangle_raw_level(2, 1, 1.0) == rectangle_raw_level(1, 2, 1.0));
  CHECK(rectangle_raw_level(2, 1, 1.0) == doctest::Approx(5 * kPi / 4));
  CHECK_THROWS(rectangle_raw_level(0, 1, 1.0));
}

TEST_CASE("rectangle smooth count") {
  CHECK(unfold_rectangle(1e-300, 1.3) == doctest::Approx(0.25));
  CHECK(unfold_rectangle(1e4, 1.0) == doctest::Approx(9887.412).epsilon(1e-7));
  const auto exact = static_cast<double>(oracle::rectangle_count_below(1e4, 1.1));
  CHECK(std::abs(exact - unfold_rectangle(1e4, 1.1)) / exact < 0.015);
  for (double x : {1.0, 10.0, 1e3, 1e4, 1e6}) {
    const double e = rectangle_raw_from_unfolded(x, 0.7);
    CHECK(unfold_rectangle(e, 0.7) == doctest::Approx(x).epsilon(1e-13));
  }
  double prev = unfold_rectangle(1.0, 1.6);
  for (double e = 1.5; e < 1e5; e *= 1.3) {
    const double x = unfold_rectangle(e, 1.6);
    CHECK(x > prev);
    prev = x;
  }
}

TEST_CASE("kepler raw levels and smooth count") {
  CHECK(kepler_raw_level(0, 1, 2.0) == 1.0);
  CHECK(kepler_raw_level(1, 1, 0.5) == doctest::Approx(3.0));
  CHECK(kepler_raw_level(3, 7, 5.0) == doctest::Approx(67.9737).epsilon(1e-6));
  CHECK_THROWS(kepler_raw_level(-1, 1, 1.0));
  // The leading term dominates the rest of the smooth count.
  const double lead = std::pow(1e4, 1.5) / 3;
  CHECK(lead == doctest::Approx(333333.3).epsilon(1e-6));
  CHECK(lead / std::abs(unfold_kepler(1e4, 0.5) - lead) > 1e2);
  double prev = unfold_kepler(1.0, 5.0);
  for (double e = 1.2; e < 1e5; e *= 1.2) {
    const double x = unfold_kepler(e, 5.0);
    CHECK(x > prev);
    prev = x;
  }
  for (double x : {0.5, 10.0, 1e4, 3e5}) {
    const double e = kepler_raw_from_unfolded(x, 4.0);
    CHECK(unfold_kepler(e, 4.0) == doctest::Approx(x).epsilon(1e-13));
  }
}

TEST_CASE("kepler smooth count tracks the exact staircase") {
  // Residual N(E) - Nbar(E) averaged over many E must vanish.
  for (double beta : {3.0, 5.0, 7.5}) {
    double sum = 0;
    int n = 0;
    for (double e = 1500; e < 2500; e += 0.37, ++n)
      sum += static_cast<double>(oracle::kepler_count_below(e, beta)) - unfold_kepler(e, beta);
    CHECK(std::abs(sum / n) < 0.1);
  }
}

TEST_CASE("windows are sorted and inside their bounds") {
  for (auto sys : {SystemKind::Rectangle, SystemKind::Kepler}) {
    const double p = sys == SystemKind::Rectangle ? 1.23 : 4.4;
    const UnfoldedWindow w = window_for_parameter(sys, p, 1e4, 100, 3);
    CHECK(w.member_id == 3);
    CHECK(w.levels.size() > 50);
    CHECK(std::is_sorted(w.levels.begin(), w.levels.end()));
    CHECK(w.levels.front() >= w.lower());
    CHECK(w.levels.back() <= w.upper());
    CHECK_FALSE(find_degeneracy(w).has_value());
  }
}

TEST_CASE("window below the ground state is empty") {
  CHECK(rectangle_window(1.0, 0.5, 0.1, 0).levels.empty());
  CHECK(kepler_window(5.0, 0.2, 0.1, 0).levels.empty());
}

TEST_CASE("window enumeration equals brute force") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> alpha(0.5, 2.0), beta(3.0, 8.0);
  for (int i = 0; i < 20; ++i) {
    const double a = alpha(rng);
    CHECK(rectangle_window(a, 1e4, 100, 0).levels == oracle::rectangle_window_brute(a, 1e4, 100));
    const double b = beta(rng);
    CHECK(kepler_window(b, 1e4, 100, 0).levels == oracle::kepler_window_brute(b, 1e4, 100));
  }
  // Low energies, where the window reaches the bottom of the spectrum.
  CHECK(rectangle_window(1.7, 30, 3, 0).levels == oracle::rectangle_window_brute(1.7, 30, 3));
  CHECK(kepler_window(6.0, 20, 2, 0).levels == oracle::kepler_window_brute(6.0, 20, 2));
}

TEST_CASE("ensemble-averaged unfolded density is one") {
  for (auto sys : {SystemKind::Rectangle, SystemKind::Kepler}) {
    EnsembleConfig c = EnsembleConfig::defaults(sys);
    c.member_count = 10000;
    double levels = 0;
    for (std::uint64_t i = 0; i < c.member_count; ++i)
      levels += static_cast<double>(member_window(c, i).levels.size());
    CHECK(levels / static_cast<double>(c.member_count) / c.window_width == doctest::Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("square billiard is degenerate") {
  const UnfoldedWindow w = rectangle_window(1.0, 1e4, 100, 0);
  CHECK(find_degeneracy(w).has_value());
}
