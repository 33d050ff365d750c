#include "levrep/models.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "levrep/simd/kernels.hpp"

namespace levrep {

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-13) {
  if (a == b) return 0;
  double error = 0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &error);
}

void check_energy(double energy) {
  if (!(energy > 0) || !std::isfinite(energy))
    throw std::invalid_argument("energy must be positive");
}

}  // namespace

void AnsatzParams::validate() const {
  if (!(t_min >= 0 && t_min < kPi))
    throw std::invalid_argument("t_min must satisfy 0 <= t_min < pi");
}

double t_min_rectangle(double energy) {
  check_energy(energy);
  return 2 * std::pow(kPi, 1.5) / std::sqrt(energy);
}

double t_min_kepler(double energy, double beta) {
  check_energy(energy);
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  return kPi / std::cbrt(3 * energy * std::sqrt(2 * beta));
}

double ansatz_kernel(double omega, AnsatzParams params) {
  const double t = params.t_min;
  const double x = omega * t;
  if (std::abs(x) < 1e-8) return t / kPi * (1 - x * x / 6);
  return std::sin(x) / (kPi * omega);
}

double gue_kernel(double omega) {
  if (std::abs(omega) < 1e-8) return (1 - omega * omega / 3) / kPi;
  const double s = std::sin(omega);
  return s * s / (kPi * omega * omega);
}

double weight_delta_M(std::int64_t m1, std::int64_t m2) {
  if (m1 < 0 || m2 < 0) throw std::invalid_argument("winding numbers must be >= 0");
  if (m1 == 0 && m2 == 0) return 0;
  if (m1 == 0 || m2 == 0) return 0.25;
  return 1;
}

// --- Kepler sum ------------------------------------------------------------

double kepler_kernel_term(std::int64_t m, double omega, double energy, double beta) {
  const double mm = static_cast<double>(m);
  const double floor_scale = std::cbrt(2 * beta / (3 * energy));
  const double freq = kPi / std::cbrt(3 * energy * std::sqrt(2 * beta));
  const double weight = (std::floor(mm / floor_scale) + 0.25) * 2 * std::sqrt(2 * beta) /
                        (kPi * kPi * mm * mm * mm);
  return weight * std::sin(freq * mm * omega);
}

SeriesValue kepler_kernel(double omega, double energy, double beta, std::int64_t m_max) {
  check_energy(energy);
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (m_max < 1) throw std::invalid_argument("m_max must be >= 1");

  const double floor_scale = std::cbrt(2 * beta / (3 * energy));
  const double freq = kPi / std::cbrt(3 * energy * std::sqrt(2 * beta));
  const double c = 2 * std::sqrt(2 * beta) / (kPi * kPi);
  std::vector<double> w(static_cast<std::size_t>(m_max));
  std::vector<double> t(w.size());
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const double mm = static_cast<double>(m);
    w[m - 1] = (std::floor(mm / floor_scale) + 0.25) * c / (mm * mm * mm);
    t[m - 1] = freq * mm;
  }
  SeriesValue out;
  out.value = simd::sin_sum(w, t, omega);
  // |term| <= c (M/s + 1/4) / M^3; sum_{M>N} 1/M^2 <= 1/N, sum 1/M^3 <= 1/(2N^2).
  const double n = static_cast<double>(m_max);
  out.tail_bound = c * (1 / (floor_scale * n) + 0.25 / (2 * n * n));
  out.m_max = m_max;
  return out;
}

// --- rectangle variance ----------------------------------------------------

namespace {

class RectangleLattice {
public:
  RectangleLattice(double energy, double alpha, double L)
      : alpha_(alpha), L_(L), k_(std::sqrt(4 * kPi / energy)),
        prefactor_(2 * std::sqrt(energy) / std::pow(kPi, 2.5)) {}

  // Extends the box [0, m]^2 to [0, m_new]^2 and returns the running value.
  double extend_to(std::int64_t m_new) {
    if (m_new <= m_) return prefactor_ * raw_;
    const auto size = static_cast<std::size_t>(m_new) + 1;
    cols_.resize(size);
    for (std::size_t j = 0; j < size; ++j) {
      const double jj = static_cast<double>(j);
      cols_[j] = jj * jj / alpha_;
    }
    const std::span<const double> all(cols_);
    // Old rows, new columns (m, m_new].
    if (m_ >= 0) {
      const auto fresh = all.subspan(static_cast<std::size_t>(m_) + 1);
      for (std::int64_t r = 0; r <= m_; ++r) raw_ += row(r, fresh, r == 0 ? 0.25 : 1.0);
    }
    // New rows (m, m_new], all columns.
    for (std::int64_t r = m_ + 1; r <= m_new; ++r) {
      const double a = row_offset(r);
      if (r == 0) {
        raw_ += 0.25 * simd::lattice_row_sum(0.0, all.subspan(1), k_, L_);
      } else {
        raw_ += 0.25 * simd::lattice_row_sum(a, all.first(1), k_, L_);
        raw_ += simd::lattice_row_sum(a, all.subspan(1), k_, L_);
      }
    }
    m_ = m_new;
    return prefactor_ * raw_;
  }

  std::int64_t m_max() const { return m_; }

private:
  double row_offset(std::int64_t r) const {
    const double rr = static_cast<double>(r);
    return rr * rr * alpha_;
  }
  double row(std::int64_t r, std::span<const double> cols, double weight) const {
    return weight * simd::lattice_row_sum(row_offset(r), cols, k_, L_);
  }

  double alpha_;
  double L_;
  double k_;
  double prefactor_;
  std::int64_t m_ = -1;
  double raw_ = 0;
  std::vector<double> cols_;
};

void check_rectangle_args(double L, double energy, double alpha) {
  check_energy(energy);
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be positive");
  if (!(L > 0)) throw std::invalid_argument("L must be positive");
}

}  // namespace

double rectangle_variance_tail_bound(double energy, double alpha, std::int64_t m_max) {
  check_energy(energy);
  if (m_max < 2) throw std::invalid_argument("m_max must be >= 2 for the tail bound");
  // Each omitted term is at most 2 * prefactor * delta_M / Q^{3/2}, and
  // Q >= min(alpha, 1/alpha) |M|^2. Interior points (both indices >= 1) own a
  // unit cell lying outside radius m_max - sqrt(2); axis points are 1D sums.
  const double prefactor = 2 * std::sqrt(energy) / std::pow(kPi, 2.5);
  const double q_min = std::min(alpha, 1 / alpha);
  const double r = static_cast<double>(m_max);
  const double interior = (kPi / 2) / (r - std::numbers::sqrt2) / std::pow(q_min, 1.5);
  const double axes = 0.25 * (std::pow(alpha, -1.5) + std::pow(alpha, 1.5)) / (2 * r * r);
  return 2 * prefactor * (interior + axes);
}

SeriesValue rectangle_variance_analytic(double L, double energy, double alpha,
                                        std::int64_t m_max) {
  check_rectangle_args(L, energy, alpha);
  if (m_max < 2) throw std::invalid_argument("m_max must be >= 2");
  RectangleLattice lattice(energy, alpha, L);
  SeriesValue out;
  out.value = lattice.extend_to(m_max);
  out.tail_bound = rectangle_variance_tail_bound(energy, alpha, m_max);
  out.m_max = m_max;
  return out;
}

SeriesValue rectangle_variance_adaptive(double L, double energy, double alpha, double rel_tol,
                                        std::int64_t m_cap) {
  check_rectangle_args(L, energy, alpha);
  if (!(rel_tol > 0)) throw std::invalid_argument("rel_tol must be positive");
  RectangleLattice lattice(energy, alpha, L);
  std::int64_t m = std::min<std::int64_t>(64, m_cap);
  double value = lattice.extend_to(m);
  double bound = rectangle_variance_tail_bound(energy, alpha, m);
  while (bound > rel_tol * value && m < m_cap) {
    // The bound falls like 1/m; aim directly for the target with some slack.
    const double target = value > 0 ? bound / (rel_tol * value) : 2.0;
    const auto next = static_cast<std::int64_t>(std::ceil(static_cast<double>(m) * std::max(1.25, target * 1.05)));
    m = std::min(m_cap, next);
    value = lattice.extend_to(m);
    bound = rectangle_variance_tail_bound(energy, alpha, m);
  }
  return {value, bound, m};
}

std::vector<double> parameter_quantile_nodes(const ParamLaw& law, int nodes) {
  law.validate();
  if (nodes < 1) throw std::invalid_argument("need at least one node");
  const double sigma = law.sigma();
  std::vector<double> out(static_cast<std::size_t>(nodes), law.mean);
  if (sigma == 0) return out;
  const boost::math::normal unit;
  const double lo = boost::math::cdf(unit, (law.lower_cut - law.mean) / sigma);
  const double hi = boost::math::cdf(unit, (law.upper_cut - law.mean) / sigma);
  for (int k = 0; k < nodes; ++k) {
    const double u = lo + (hi - lo) * (k + 0.5) / nodes;
    out[static_cast<std::size_t>(k)] = law.mean + sigma * boost::math::quantile(unit, u);
  }
  return out;
}

SeriesValue rectangle_variance_ensemble(double L, double energy, const ParamLaw& law, int nodes,
                                        double rel_tol) {
  if (law.sigma() == 0) {
    law.validate();
    return rectangle_variance_adaptive(L, energy, law.mean, rel_tol);
  }
  SeriesValue out;
  const auto alphas = parameter_quantile_nodes(law, nodes);
  for (const double alpha : alphas) {
    const SeriesValue v = rectangle_variance_adaptive(L, energy, alpha, rel_tol);
    out.value += v.value;
    out.tail_bound += v.tail_bound;
    out.m_max = std::max(out.m_max, v.m_max);
  }
  out.value /= static_cast<double>(alphas.size());
  out.tail_bound /= static_cast<double>(alphas.size());
  return out;
}

// --- spacing laws ----------------------------------------------------------

double poisson_spacing_pdf(double s) { return std::exp(-s); }

double poisson_cumulative_P(double s) {
  if (!(s > 0)) throw std::invalid_argument("s must be positive");
  return -std::expm1(-s) / s;
}

double spacing_pdf_from_kernel(const std::function<double(double)>& g, double s) {
  if (!(s >= 0) || !std::isfinite(s)) throw std::invalid_argument("s must be >= 0");
  auto checked = [&](double x) {
    const double v = g(x);
    if (v < 0)
      throw std::domain_error("g(x) = 1 - K(x) is negative at x = " + std::to_string(x));
    return v;
  };
  constexpr int kProbe = 256;
  for (int i = 0; i <= kProbe; ++i) checked(s * i / kProbe);
  const double inner = integrate(checked, 0.0, s);
  return checked(s) * std::exp(-inner);
}

double ansatz_survival(double s, AnsatzParams params) {
  params.validate();
  return std::exp(-s + sine_integral(s * params.t_min) / kPi);
}

double ansatz_spacing_pdf(double s, AnsatzParams params) {
  params.validate();
  if (!(s >= 0)) throw std::invalid_argument("s must be >= 0");
  const double g = 1 - ansatz_kernel(s, params);
  return g * ansatz_survival(s, params);
}

double ansatz_cumulative_P(double s, AnsatzParams params) {
  params.validate();
  if (!(s > 0)) throw std::invalid_argument("s must be positive");
  const double exponent = -s + sine_integral(s * params.t_min) / kPi;
  return -std::expm1(exponent) / s;
}

double ansatz_cumulative_P_asymptote(double s, AnsatzParams params) {
  params.validate();
  return poisson_cumulative_P(s) - params.t_min / kPi;
}

double ansatz_bin_average(double a, double b, AnsatzParams params) {
  params.validate();
  if (!(b > a) || a < 0) throw std::invalid_argument("bin must satisfy 0 <= a < b");
  const double ea = -a + sine_integral(a * params.t_min) / kPi;
  const double eb = -b + sine_integral(b * params.t_min) / kPi;
  // exp(ea) - exp(eb) = exp(ea) * (1 - exp(eb - ea))
  return -std::exp(ea) * std::expm1(eb - ea) / (b - a);
}

// --- kernel model ----------------------------------------------------------

KernelModel KernelModel::ansatz(AnsatzParams params) {
  params.validate();
  KernelModel k;
  k.kind_ = KernelKind::Ansatz;
  k.params_ = params;
  return k;
}

KernelModel KernelModel::gue() {
  KernelModel k;
  k.kind_ = KernelKind::Gue;
  k.params_ = std::monostate{};
  return k;
}

KernelModel KernelModel::rectangle(RectangleSumParams params) {
  check_energy(params.energy);
  if (!(params.alpha > 0) || params.m_max < 2)
    throw std::invalid_argument("rectangle kernel needs alpha > 0 and m_max >= 2");
  KernelModel k;
  k.kind_ = KernelKind::RectangleSum;
  k.params_ = params;
  return k;
}

KernelModel KernelModel::kepler(KeplerSumParams params) {
  check_energy(params.energy);
  if (!(params.beta > 0) || params.m_max < 1)
    throw std::invalid_argument("kepler kernel needs beta > 0 and m_max >= 1");
  KernelModel k;
  k.kind_ = KernelKind::KeplerSum;
  k.params_ = params;
  return k;
}

double KernelModel::operator()(double omega) const {
  switch (kind_) {
    case KernelKind::Ansatz:
      return ansatz_kernel(omega, std::get<AnsatzParams>(params_));
    case KernelKind::Gue:
      return gue_kernel(omega);
    case KernelKind::KeplerSum: {
      const auto& p = std::get<KeplerSumParams>(params_);
      return kepler_kernel(omega, p.energy, p.beta, p.m_max).value;
    }
    case KernelKind::RectangleSum:
      break;
  }
  throw std::logic_error("the rectangle cosine sum has no pointwise value");
}

double KernelModel::number_variance(double L) const {
  if (!(L > 0)) throw std::invalid_argument("L must be positive");
  switch (kind_) {
    case KernelKind::RectangleSum: {
      const auto& p = std::get<RectangleSumParams>(params_);
      return rectangle_variance_analytic(L, p.energy, p.alpha, p.m_max).value;
    }
    case KernelKind::KeplerSum:
      throw std::logic_error("number variance is not defined for the odd Kepler sum");
    case KernelKind::Ansatz:
    case KernelKind::Gue:
      break;
  }
  const auto integrand = [this, L](double w) { return (L - w) * (*this)(w); };
  const auto panels = static_cast<int>(std::ceil(L));
  double repulsion = 0;
  for (int i = 0; i < panels; ++i)
    repulsion += integrate(integrand, L * i / panels, L * (i + 1) / panels);
  return L - 2 * repulsion;
}

double kernel_integral(const std::function<double(double)>& kernel, double half_range,
                       double panel) {
  if (!(half_range > 0) || !(panel > 0)) throw std::invalid_argument("bad integration range");
  const auto panels = static_cast<std::int64_t>(std::ceil(2 * half_range / panel));
  const double width = 2 * half_range / static_cast<double>(panels);
  double total = 0;
  for (std::int64_t i = 0; i < panels; ++i) {
    const double a = -half_range + width * static_cast<double>(i);
    total += integrate(kernel, a, a + width, 1e-12);
  }
  return total;
}

}  // namespace levrep
