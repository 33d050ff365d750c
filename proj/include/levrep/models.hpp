#pragma once

// Closed-form theory: smooth correlation kernels, the repulsion ansatz, the
// spacing law built from a kernel, and kernel-derived number variance.
//
// Conventions: energies and separations are in units of the mean spacing;
// a kernel K(w) is the smooth (repulsive) part of the two-point function,
// K(e, w) = delta(w) - K(w), so that g(x) = 1 - K(x) is the pair density.

#include <cstdint>
#include <functional>
#include <vector>
#include <variant>

#include "levrep/ensemble.hpp"

namespace levrep {

struct AnsatzParams {
  double t_min = 0;  // period of the shortest periodic orbit

  /// 0 <= t_min < pi, so that g(0) = 1 - t_min/pi stays a valid density.
  void validate() const;
};

/// A partial sum together with an upper bound on the omitted tail.
struct SeriesValue {
  double value = 0;
  double tail_bound = 0;
  std::int64_t m_max = 0;
};

// --- scalars and special functions ----------------------------------------

/// 2 pi^{3/2} / sqrt(energy): shortest-orbit period for the rectangle.
double t_min_rectangle(double energy);

/// pi / (3 energy sqrt(2 beta))^{1/3}, read off the first sine of the Kepler
/// sum. A convenience derived from that sum, not an independent result.
double t_min_kepler(double energy, double beta);

/// Si(x) = int_0^x sin(t)/t dt. Power series for |x| <= 4, continued
/// fraction for E1(ix) up to |x| = 25, asymptotic expansion beyond.
/// Absolute accuracy better than 1e-10 everywhere.
double sine_integral(double x);

// --- kernels ---------------------------------------------------------------

/// sin(w t_min) / (pi w); t_min/pi at w = 0.
double ansatz_kernel(double omega, AnsatzParams params);

/// sin^2(w) / (pi w^2); 1/pi at w = 0. Unit mean spacing absorbed in w.
double gue_kernel(double omega);

/// Winding-number weight: 0 if both are zero, 1/4 if exactly one is, else 1.
double weight_delta_M(std::int64_t m1, std::int64_t m2);

/// Modified Kepler sum truncated at m_max, evaluated exactly as
///   sum_{M=1}^{m_max} (floor(M / (2b/3e)^{1/3}) + 1/4) 2 sqrt(2b)/(pi^2 M^3)
///                      * sin(pi M w / (3 e sqrt(2b))^{1/3}).
/// It is odd in w; no symmetrisation is applied.
SeriesValue kepler_kernel(double omega, double energy, double beta, std::int64_t m_max);
double kepler_kernel_term(std::int64_t m, double omega, double energy, double beta);

// --- rectangle number variance --------------------------------------------

/// Termwise double integral of the rectangle cosine sum over [0, L]^2,
///   sum_{0 <= M1, M2 <= m_max} (2 delta_M sqrt(e) / pi^{5/2}) (1 - cos(T_M L)) / Q^{3/2},
/// Q = M1^2 alpha + M2^2 / alpha, T_M = sqrt(4 pi Q / e). Here alpha is the
/// generator's aspect parameter (the spectrum (pi/4)(n^2/alpha + m^2 alpha)).
SeriesValue rectangle_variance_analytic(double L, double energy, double alpha,
                                        std::int64_t m_max);

/// Upper bound on the terms omitted by a box truncation at m_max; independent
/// of L and decreasing in m_max.
double rectangle_variance_tail_bound(double energy, double alpha, std::int64_t m_max);

/// Grows m_max until tail_bound <= rel_tol * value (or m_cap is reached).
SeriesValue rectangle_variance_adaptive(double L, double energy, double alpha,
                                        double rel_tol = 1e-3,
                                        std::int64_t m_cap = std::int64_t{1} << 17);

/// Average of rectangle_variance_adaptive over `nodes` equal-mass quantile
/// nodes of the truncated normal law (parametric average of the overlay).
SeriesValue rectangle_variance_ensemble(double L, double energy, const ParamLaw& law,
                                        int nodes = 8, double rel_tol = 1e-3);

/// Equal-mass quantile nodes of the truncated normal law.
std::vector<double> parameter_quantile_nodes(const ParamLaw& law, int nodes);

// --- spacing laws ----------------------------------------------------------

double poisson_spacing_pdf(double s);
/// (1 - e^{-s}) / s
double poisson_cumulative_P(double s);

/// p(s) = g(s) exp(-int_0^s g), g = 1 - K. Adaptive Gauss-Kronrod for the
/// inner integral. Throws std::domain_error if g < 0 anywhere on [0, s].
double spacing_pdf_from_kernel(const std::function<double(double)>& g, double s);

/// [1 - sin(s t)/(pi s)] exp[-s + Si(s t)/pi]; 1 - t/pi at s = 0.
double ansatz_spacing_pdf(double s, AnsatzParams params);
/// Probability that a spacing exceeds s: exp[-s + Si(s t)/pi].
double ansatz_survival(double s, AnsatzParams params);
/// (1 - exp[-s + Si(s t)/pi]) / s
double ansatz_cumulative_P(double s, AnsatzParams params);
/// Small-s form P_p(s) - t/pi.
double ansatz_cumulative_P_asymptote(double s, AnsatzParams params);
/// Mean of the ansatz density over [a, b].
double ansatz_bin_average(double a, double b, AnsatzParams params);

// --- kernel model ----------------------------------------------------------

enum class KernelKind { Ansatz, Gue, RectangleSum, KeplerSum };

struct RectangleSumParams {
  double energy = 1e4;
  double alpha = 1;
  std::int64_t m_max = 64;
};

struct KeplerSumParams {
  double energy = 1e4;
  double beta = 5;
  std::int64_t m_max = 200;
};

class KernelModel {
public:
  static KernelModel ansatz(AnsatzParams params);
  static KernelModel gue();
  static KernelModel rectangle(RectangleSumParams params);
  static KernelModel kepler(KeplerSumParams params);

  KernelKind kind() const { return kind_; }
  /// The rectangle cosine sum has no pointwise limit.
  bool has_pointwise() const { return kind_ != KernelKind::RectangleSum; }
  /// Pointwise K(w). Throws std::logic_error for RectangleSum.
  double operator()(double omega) const;
  /// Sigma^2(L) = L - 2 int_0^L (L - w) K(w) dw, or the termwise sum for the
  /// rectangle. Throws std::logic_error for KeplerSum (odd as printed).
  double number_variance(double L) const;

private:
  KernelKind kind_ = KernelKind::Gue;
  std::variant<AnsatzParams, std::monostate, RectangleSumParams, KeplerSumParams> params_;
};

/// int_{-A}^{A} K(w) dw by adaptive Gauss-Kronrod on panels of width `panel`
/// (sum-rule check for oscillatory kernels).
double kernel_integral(const std::function<double(double)>& kernel, double half_range,
                       double panel = 1.0);

}  // namespace levrep
