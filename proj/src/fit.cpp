#include "levrep/fit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <vector>

#include "levrep/models.hpp"

namespace levrep {

double golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                               double tolerance) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tolerance) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

namespace {

std::vector<double> residual_weights(const SpacingHistogram& hist) {
  std::vector<double> populated;
  for (std::size_t i = 0; i < hist.bins(); ++i)
    if (hist.density[i] > 0) populated.push_back(hist.stderr_density[i]);
  if (populated.empty()) throw FitError("histogram has no populated bins");
  std::sort(populated.begin(), populated.end());
  const double floor = populated[populated.size() / 10];
  std::vector<double> w(hist.bins());
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double se = std::max(hist.stderr_density[i], floor);
    w[i] = 1 / (se * se);
  }
  return w;
}

double objective_with(const SpacingHistogram& hist, const std::vector<double>& weights, double t) {
  const AnsatzParams params{t};
  double sum = 0;
  for (std::size_t i = 0; i < hist.bins(); ++i) {
    const double model = ansatz_bin_average(hist.bin_edges[i], hist.bin_edges[i + 1], params);
    const double r = hist.density[i] - model;
    sum += weights[i] * r * r;
  }
  return sum;
}

}  // namespace

double t_min_objective(const SpacingHistogram& hist, double t_min) {
  return objective_with(hist, residual_weights(hist), t_min);
}

FitResult fit_t_min(const SpacingHistogram& hist, double lo, double hi) {
  if (hist.total_spacings == 0 || hist.bins() == 0) throw FitError("empty histogram");
  if (!(lo >= 0 && lo < hi && hi < std::numbers::pi))
    throw FitError("bracket must satisfy 0 <= lo < hi < pi");
  const auto weights = residual_weights(hist);
  const auto f = [&](double t) { return objective_with(hist, weights, t); };

  constexpr int kScan = 200;
  const double step = (hi - lo) / (kScan - 1);
  int best = 0;
  double best_value = f(lo);
  for (int i = 1; i < kScan; ++i) {
    const double v = f(lo + step * i);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  const double a = lo + step * std::max(0, best - 1);
  const double b = lo + step * std::min(kScan - 1, best + 1);
  double t = golden_section_minimize(f, a, b, 1e-5);
  double value = f(t);
  if (best_value < value) {
    t = lo + step * best;
    value = best_value;
  }

  FitResult r;
  r.parameter = t;
  r.objective = value;
  r.n_points = static_cast<std::int64_t>(hist.bins());
  r.bracket_lo = lo;
  r.bracket_hi = hi;
  r.at_bracket_edge = best == 0 || best == kScan - 1;
  const double h = std::max(1e-4, 1e-3 * (hi - lo));
  const double tl = std::max(lo, t - h), tr = std::min(hi, t + h);
  const double curvature = (f(tr) - 2 * value + f(tl)) / ((tr - t) * (t - tl));
  r.parameter_stderr = curvature > 0 ? std::sqrt(2 / curvature) : INFINITY;
  return r;
}

FitResult fit_sqrt_coefficient(std::span<const SweepPoint> points, double s) {
  std::set<double> energies;
  for (const auto& p : points) {
    if (!(p.energy > 0)) throw FitError("sweep energies must be positive");
    energies.insert(p.energy);
  }
  if (energies.size() < 3) throw FitError("coefficient fit needs at least three distinct energies");
  const double pp = poisson_cumulative_P(s);
  const bool unit = std::any_of(points.begin(), points.end(), [](const SweepPoint& p) { return !(p.stderr_p > 0); });

  double sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double w = unit ? 1.0 : 1 / (p.stderr_p * p.stderr_p);
    const double x = 1 / std::sqrt(p.energy);
    const double y = pp - p.p_measured;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  FitResult r;
  r.parameter = sxy / sxx;
  for (const auto& p : points) {
    const double w = unit ? 1.0 : 1 / (p.stderr_p * p.stderr_p);
    const double resid = pp - p.p_measured - r.parameter / std::sqrt(p.energy);
    r.objective += w * resid * resid;
  }
  r.n_points = static_cast<std::int64_t>(points.size());
  r.parameter_stderr = unit ? std::sqrt(r.objective / std::max<double>(1, r.n_points - 1) / sxx)
                            : 1 / std::sqrt(sxx);
  r.bracket_lo = -INFINITY;
  r.bracket_hi = INFINITY;
  return r;
}

std::string format_fit_report(const FitResult& fit, const std::string& name) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "parameter: %s\nvalue: %.17g\nstderr: %.17g\nobjective: %.17g\nn_points: %lld\n"
                "bracket: [%.17g, %.17g]\nat_bracket_edge: %s\n",
                name.c_str(), fit.parameter, fit.parameter_stderr, fit.objective,
                static_cast<long long>(fit.n_points), fit.bracket_lo, fit.bracket_hi,
                fit.at_bracket_edge ? "true" : "false");
  return buf;
}

}  // namespace levrep
