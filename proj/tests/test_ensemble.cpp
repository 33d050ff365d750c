#include <doctest.h>

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numeric>

#include "levrep/ensemble.hpp"

using namespace levrep;

TEST_CASE("zero spread returns the mean exactly") {
  EnsembleConfig c;
  c.member_count = 1000;
  c.param_law.spread = 0;
  for (double v : sample_parameters(c)) CHECK(v == 1.0);
}

TEST_CASE("a sample depends only on seed and index") {
  const ParamLaw law = ParamLaw::rectangle_default();
  for (std::uint64_t i : {0ULL, 1ULL, 17ULL, 123456789ULL}) {
    CHECK(sample_parameter(law, 42, i) == sample_parameter(law, 42, i));
  }
  CHECK(sample_parameter(law, 42, 5) != sample_parameter(law, 43, 5));
}

TEST_CASE("sharded sampling equals one pass") {
  EnsembleConfig c;
  c.member_count = 5000;
  c.seed = 9;
  const auto all = sample_parameters(c);
  auto a = sample_parameters(c, 0, 1234);
  const auto b = sample_parameters(c, 1234, 5000);
  a.insert(a.end(), b.begin(), b.end());
  CHECK(a == all);
}

TEST_CASE("truncated normal moments at 3e5 samples") {
  EnsembleConfig c;
  c.member_count = 300000;
  const auto xs = sample_parameters(c);
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(xs.size() - 1));
  CHECK(mean == doctest::Approx(1.0).epsilon(0.005));
  CHECK(sd == doctest::Approx(0.2).epsilon(0.025));
  for (double x : xs) REQUIRE((x >= 0.5 && x <= 2.0));

  // Exact moments of the normal law truncated to [0.5, 2].
  const boost::math::normal unit;
  const double a = (0.5 - 1) / 0.2, b = (2 - 1) / 0.2;
  const double z = boost::math::cdf(unit, b) - boost::math::cdf(unit, a);
  const double pa = boost::math::pdf(unit, a), pb = boost::math::pdf(unit, b);
  const double exact_mean = 1 + 0.2 * (pa - pb) / z;
  const double exact_sd = 0.2 * std::sqrt(1 + (a * pa - b * pb) / z - std::pow((pa - pb) / z, 2));
  CHECK(std::abs(mean - exact_mean) < 4 * exact_sd / std::sqrt(3e5));
  CHECK(std::abs(sd - exact_sd) < 4 * exact_sd / std::sqrt(6e5));
}

TEST_CASE("half width at half maximum reading") {
  ParamLaw law = ParamLaw::rectangle_default();
  law.spread_kind = SpreadKind::HalfWidthHalfMax;
  CHECK(law.sigma() == doctest::Approx(0.2 / std::sqrt(2 * std::log(2.0))));
}

TEST_CASE("pathological cuts hit the rejection bound") {
  // The accepted band is about 1e-4 standard deviations wide.
  const ParamLaw law{1.0, 0.01, 0.999999, 1.0 + 1e-12, SpreadKind::StdDev};
  CHECK_THROWS_AS(
      [&] {
        for (std::uint64_t i = 0; i < 100; ++i) sample_parameter(law, 1, i);
      }(),
      ConfigError);
}

TEST_CASE("config validation") {
  EnsembleConfig c;
  CHECK_NOTHROW(c.validate());
  c.window_width = 2000;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = EnsembleConfig{};
  c.energy = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = EnsembleConfig{};
  c.member_count = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = EnsembleConfig{};
  c.param_law.lower_cut = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = EnsembleConfig::defaults(SystemKind::Kepler);
  CHECK(c.param_law.mean == 5.0);
  c.energy = 5;
  c.window_width = 0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_system("rect") == SystemKind::Rectangle);
  CHECK(parse_system("kepler") == SystemKind::Kepler);
  CHECK_THROWS_AS(parse_system("disk"), ConfigError);
}
