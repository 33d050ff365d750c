#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "levrep/models.hpp"
#include "oracles.hpp"

using namespace levrep;
constexpr double kPi = std::numbers::pi;

namespace {

double quad(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

TEST_CASE("sine integral against quadrature") {
  double worst = 0;
  for (double x = 0; x <= 60; x += 0.173) worst = std::max(worst, std::abs(sine_integral(x) - oracle::sine_integral(x)));
  for (double x : {3.999, 4.0, 4.001, 19.99, 20.0, 24.99, 25.0, 25.01, 80.0, 150.5, 400.0})
    worst = std::max(worst, std::abs(sine_integral(x) - oracle::sine_integral(x)));
  CHECK(worst < 1e-10);
  CHECK(sine_integral(0.0) == 0.0);
  CHECK(sine_integral(-2.5) == -sine_integral(2.5));
  CHECK(sine_integral(1e9) == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(sine_integral(INFINITY) == kPi / 2);
}

TEST_CASE("shortest periods") {
  CHECK(std::abs(t_min_rectangle(1e4) - 0.111366) < 1e-5);
  CHECK(t_min_rectangle(4e4) == doctest::Approx(t_min_rectangle(1e4) / 2));
  CHECK(t_min_kepler(1e4, 5) == doctest::Approx(kPi / std::cbrt(3e4 * std::sqrt(10.0))));
  CHECK_THROWS(t_min_rectangle(0));
}

TEST_CASE("kernel limits and sum rules") {
  const AnsatzParams p{0.111};
  CHECK(ansatz_kernel(0, p) == p.t_min / kPi);
  CHECK(gue_kernel(0) == 1 / kPi);
  CHECK(ansatz_kernel(1e-9, p) == doctest::Approx(p.t_min / kPi).epsilon(1e-15));
  CHECK(ansatz_kernel(3.0, p) == doctest::Approx(std::sin(0.333) / (3 * kPi)));
  const double a_int = kernel_integral([&](double w) { return ansatz_kernel(w, p); }, 3000);
  const double g_int = kernel_integral(gue_kernel, 3000);
  CHECK(a_int == doctest::Approx(1).epsilon(1e-2));
  CHECK(g_int == doctest::Approx(1).epsilon(1e-2));
  // Exact finite-range values: (2/pi) Si(A t) and 1 - (1 - cos 2A)/(pi A) + ...
  CHECK(a_int == doctest::Approx(2 / kPi * oracle::sine_integral(3000 * 0.111)).epsilon(1e-9));
}

TEST_CASE("winding weights") {
  CHECK(weight_delta_M(0, 0) == 0);
  CHECK(weight_delta_M(0, 3) == 0.25);
  CHECK(weight_delta_M(2, 0) == 0.25);
  CHECK(weight_delta_M(1, 1) == 1);
  CHECK_THROWS(weight_delta_M(-1, 0));
}

TEST_CASE("ansatz spacing law") {
  const AnsatzParams p{t_min_rectangle(1e4)};
  CHECK(ansatz_spacing_pdf(0, p) == doctest::Approx(1 - p.t_min / kPi));
  CHECK(poisson_cumulative_P(0.05) == doctest::Approx(-std::expm1(-0.05) / 0.05).epsilon(1e-15));
  CHECK(std::abs(poisson_cumulative_P(0.05) - 0.975415) < 5e-6);
  CHECK(ansatz_cumulative_P(0.05, p) == doctest::Approx(0.9417).epsilon(2e-4));
  CHECK(ansatz_cumulative_P_asymptote(0.05, p) == doctest::Approx(poisson_cumulative_P(0.05) - p.t_min / kPi));
  CHECK(quad([&](double s) { return ansatz_spacing_pdf(s, p); }, 0, 200) ==
        doctest::Approx(1 - ansatz_survival(200, p)).epsilon(1e-10));
  for (double a : {0.0, 0.3, 2.0}) {
    const double b = a + 0.05;
    const double direct = quad([&](double s) { return ansatz_spacing_pdf(s, p); }, a, b) / 0.05;
    CHECK(ansatz_bin_average(a, b, p) == doctest::Approx(direct).epsilon(1e-11));
  }
  CHECK_THROWS(AnsatzParams{kPi}.validate());
  CHECK_NOTHROW(AnsatzParams{0}.validate());
}

TEST_CASE("kernel construction reproduces the closed form") {
  for (double t : {0.0, 0.05, 0.111, 0.5, 2.0}) {
    const AnsatzParams p{t};
    const auto g = [&](double x) { return 1 - ansatz_kernel(x, p); };
    for (double s = 0; s <= 10; s += 0.25) {
      CHECK(spacing_pdf_from_kernel(g, s) == doctest::Approx(ansatz_spacing_pdf(s, p)).epsilon(1e-8).scale(1));
    }
  }
  for (double s = 0; s <= 10; s += 0.5) {
    CHECK(std::abs(ansatz_spacing_pdf(s, {0}) - std::exp(-s)) < 1e-12);
    CHECK(std::abs(spacing_pdf_from_kernel([](double) { return 1.0; }, s) - std::exp(-s)) < 1e-12);
  }
  CHECK_THROWS_AS(spacing_pdf_from_kernel([](double x) { return 1 - 2 * x; }, 1.0), std::domain_error);
}

TEST_CASE("rectangle variance sum against a direct double loop") {
  const double e = 1e4, alpha = 1.17, L = 2.5;
  for (std::int64_t m : {2, 7, 40}) {
    long double direct = 0;
    for (std::int64_t m1 = 0; m1 <= m; ++m1)
      for (std::int64_t m2 = 0; m2 <= m; ++m2) {
        const double d = weight_delta_M(m1, m2);
        if (d == 0) continue;
        const double q = static_cast<double>(m1 * m1) * alpha + static_cast<double>(m2 * m2) / alpha;
        const double t = std::sqrt(4 * kPi * q / e);
        direct += 2 * d * std::sqrt(e) / std::pow(kPi, 2.5) * (1 - std::cos(t * L)) / std::pow(q, 1.5);
      }
    CHECK(rectangle_variance_analytic(L, e, alpha, m).value == doctest::Approx(static_cast<double>(direct)).epsilon(1e-12));
  }
}

TEST_CASE("rectangle variance tail bound is honest") {
  const double e = 1e4;
  for (double alpha : {0.6, 1.0, 1.9}) {
    for (double L : {1.0, 10.0}) {
      const double far = rectangle_variance_analytic(L, e, alpha, 4000).value;
      for (std::int64_t m : {50, 400}) {
        const SeriesValue v = rectangle_variance_analytic(L, e, alpha, m);
        CHECK(far - v.value >= 0);
        CHECK(far - v.value <= v.tail_bound);
      }
    }
    CHECK(rectangle_variance_tail_bound(e, alpha, 100) > rectangle_variance_tail_bound(e, alpha, 200));
  }
  const SeriesValue v = rectangle_variance_adaptive(10, e, 1.2, 1e-2);
  CHECK(v.tail_bound <= 1e-2 * v.value);
}

TEST_CASE("quantile nodes of the parameter law") {
  const auto nodes = parameter_quantile_nodes(ParamLaw::rectangle_default(), 8);
  REQUIRE(nodes.size() == 8);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(nodes.front() > 0.5);
  CHECK(nodes.back() < 2.0);
  ParamLaw flat = ParamLaw::rectangle_default();
  flat.spread = 0;
  for (double x : parameter_quantile_nodes(flat, 3)) CHECK(x == 1.0);
}

TEST_CASE("kepler sum") {
  const double e = 1e4, beta = 5;
  double direct = 0;
  for (std::int64_t m = 1; m <= 50; ++m) direct += kepler_kernel_term(m, 0.7, e, beta);
  const SeriesValue s50 = kepler_kernel(0.7, e, beta, 50);
  CHECK(s50.value == doctest::Approx(direct).epsilon(1e-12));
  const SeriesValue s5000 = kepler_kernel(0.7, e, beta, 5000);
  CHECK(std::abs(s5000.value - s50.value) <= s50.tail_bound);
  CHECK(kepler_kernel(-0.7, e, beta, 50).value == doctest::Approx(-s50.value));
  CHECK(kepler_kernel(0, e, beta, 50).value == 0);
}

TEST_CASE("kernel-model number variance") {
  const KernelModel poissonish = KernelModel::ansatz({0});
  CHECK(poissonish.number_variance(7) == doctest::Approx(7));
  const AnsatzParams p{0.3};
  const KernelModel a = KernelModel::ansatz(p);
  const double L = 4;
  const double direct = L - 2 * quad([&](double w) { return (L - w) * ansatz_kernel(w, p); }, 0, L);
  CHECK(a.number_variance(L) == doctest::Approx(direct).epsilon(1e-10));
  // Large-L form (ln(2L) + gamma + 1)/pi for sin^2(w)/(pi w^2).
  const KernelModel g = KernelModel::gue();
  const double big = 200;
  CHECK(g.number_variance(big) ==
        doctest::Approx((std::log(2 * big) + std::numbers::egamma + 1) / kPi).epsilon(1e-2));
  const KernelModel rect = KernelModel::rectangle({1e4, 1.1, 64});
  CHECK_FALSE(rect.has_pointwise());
  CHECK_THROWS_AS(rect(0.5), std::logic_error);
  CHECK(rect.number_variance(3) == doctest::Approx(rectangle_variance_analytic(3, 1e4, 1.1, 64).value));
  CHECK_THROWS_AS(KernelModel::kepler({}).number_variance(1), std::logic_error);
  CHECK(KernelModel::kepler({1e4, 5, 30})(0.4) == doctest::Approx(kepler_kernel(0.4, 1e4, 5, 30).value));
}
