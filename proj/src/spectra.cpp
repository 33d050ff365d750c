#include "levrep/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levrep {

namespace {

constexpr double kPi = std::numbers::pi;

void check_window_args(double parameter, double energy, double window_width) {
  if (!(parameter > 0) || !std::isfinite(parameter))
    throw std::invalid_argument("system parameter must be positive");
  if (!(energy > 0) || !(window_width > 0))
    throw std::invalid_argument("energy and window width must be positive");
}

UnfoldedWindow empty_window(double energy, double window_width, std::uint64_t member_id) {
  UnfoldedWindow w;
  w.member_id = member_id;
  w.center = energy;
  w.half_width = window_width / 2;
  return w;
}

}  // namespace

std::optional<std::size_t> find_degeneracy(const UnfoldedWindow& window, double tolerance) {
  const auto& x = window.levels;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i + 1] - x[i] < tolerance) return i;
  return std::nullopt;
}

double rectangle_raw_level(std::int64_t n, std::int64_t m, double alpha) {
  if (n < 1 || m < 1) throw std::invalid_argument("rectangle quantum numbers must be >= 1");
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return kPi / 4 * (nn * nn / alpha + mm * mm * alpha);
}

double unfold_rectangle(double e, double alpha) {
  const double perimeter = std::sqrt(alpha) + 1 / std::sqrt(alpha);
  return e - perimeter * std::sqrt(e / kPi) + 0.25;
}

double rectangle_raw_from_unfolded(double x, double alpha) {
  // x - 1/4 = u^2 - c u with u = sqrt(e).
  const double c = (std::sqrt(alpha) + 1 / std::sqrt(alpha)) / std::sqrt(kPi);
  const double disc = c * c + 4 * (x - 0.25);
  if (disc <= 0) return 0;
  const double u = (c + std::sqrt(disc)) / 2;
  return u * u;
}

UnfoldedWindow rectangle_window(double alpha, double energy, double window_width,
                                std::uint64_t member_id) {
  check_window_args(alpha, energy, window_width);
  UnfoldedWindow w = empty_window(energy, window_width, member_id);
  const double lo = w.lower();
  const double hi = w.upper();
  const double e_lo = rectangle_raw_from_unfolded(lo, alpha);
  const double e_hi = rectangle_raw_from_unfolded(hi, alpha);
  if (e_hi <= 0) return w;

  const double r_lo = 4 * e_lo / kPi;
  const double r_hi = 4 * e_hi / kPi;
  // n^2/alpha + alpha <= r_hi for m >= 1.
  const double n_top = std::sqrt(std::max(0.0, (r_hi - alpha) * alpha));
  const auto n_max = static_cast<std::int64_t>(n_top) + 1;
  w.levels.reserve(static_cast<std::size_t>(window_width * 1.2) + 8);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    const double nn = static_cast<double>(n);
    const double base = nn * nn / alpha;
    const double top = (r_hi - base) / alpha;
    if (top < 1 - 1e-9) break;
    const double bottom = std::max(0.0, (r_lo - base) / alpha);
    const std::int64_t m_lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::sqrt(bottom))) - 1);
    const std::int64_t m_hi = static_cast<std::int64_t>(std::sqrt(top)) + 1;
    for (std::int64_t m = m_lo; m <= m_hi; ++m) {
      const double x = unfold_rectangle(rectangle_raw_level(n, m, alpha), alpha);
      if (x >= lo && x <= hi) w.levels.push_back(x);
    }
  }
  std::sort(w.levels.begin(), w.levels.end());
  return w;
}

double kepler_raw_level(std::int64_t p, std::int64_t l, double beta) {
  if (p < 0 || l < 1) throw std::invalid_argument("kepler quantum numbers need p >= 0, l >= 1");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  const double ll = static_cast<double>(l);
  return 2 * static_cast<double>(p) * std::sqrt(2 * beta) + ll * ll;
}

double unfold_kepler(double e, double beta) {
  const double s = std::sqrt(2 * beta);
  return e * std::sqrt(e) / (3 * s) - e / (4 * s) + std::sqrt(e) / 2 - 0.25;
}

double kepler_raw_from_unfolded(double x, double beta) {
  // Bracket on the increasing branch e >= 1/4, then Newton with bisection fallback.
  double a = 0.25;
  if (x <= unfold_kepler(a, beta)) return a;
  const double s = std::sqrt(2 * beta);
  double b = std::max(1.0, std::cbrt(3 * s * (x + 1)) * std::cbrt(3 * s * (x + 1)) + 4 * s);
  while (unfold_kepler(b, beta) < x) b *= 2;
  double e = std::clamp(std::cbrt(3 * s * x) * std::cbrt(3 * s * x), a, b);
  for (int it = 0; it < 200; ++it) {
    const double f = unfold_kepler(e, beta) - x;
    if (f == 0) return e;
    if (f < 0) a = e; else b = e;
    const double df = std::sqrt(e) / (2 * s) - 1 / (4 * s) + 1 / (4 * std::sqrt(e));
    double next = e - f / df;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - e) <= 4e-16 * e) return next;
    e = next;
  }
  return e;
}

UnfoldedWindow kepler_window(double beta, double energy, double window_width,
                             std::uint64_t member_id) {
  check_window_args(beta, energy, window_width);
  UnfoldedWindow w = empty_window(energy, window_width, member_id);
  const double lo = w.lower();
  const double hi = w.upper();
  const double e_hi = kepler_raw_from_unfolded(hi, beta);
  if (e_hi < 1) return w;
  const double e_lo = kepler_raw_from_unfolded(lo, beta);
  const double step = 2 * std::sqrt(2 * beta);

  w.levels.reserve(static_cast<std::size_t>(window_width * 1.2) + 8);
  const auto l_max = static_cast<std::int64_t>(std::sqrt(e_hi)) + 1;
  for (std::int64_t l = 1; l <= l_max; ++l) {
    const double ll = static_cast<double>(l * l);
    if (ll > e_hi + step) break;
    const auto p_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil((e_lo - ll) / step)) - 1);
    const auto p_hi = static_cast<std::int64_t>(std::floor((e_hi - ll) / step)) + 1;
    for (std::int64_t p = p_lo; p <= p_hi; ++p) {
      const double x = unfold_kepler(kepler_raw_level(p, l, beta), beta);
      if (x >= lo && x <= hi) w.levels.push_back(x);
    }
  }
  std::sort(w.levels.begin(), w.levels.end());
  return w;
}

UnfoldedWindow window_for_parameter(SystemKind system, double parameter, double energy,
                                    double window_width, std::uint64_t member_id) {
  return system == SystemKind::Rectangle
             ? rectangle_window(parameter, energy, window_width, member_id)
             : kepler_window(parameter, energy, window_width, member_id);
}

UnfoldedWindow member_window(const EnsembleConfig& config, std::uint64_t member_id) {
  const double parameter = sample_parameter(config.param_law, config.seed, member_id);
  return window_for_parameter(config.system, parameter, config.energy, config.window_width,
                              member_id);
}

}  // namespace levrep
