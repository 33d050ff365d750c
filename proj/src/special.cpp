#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "levrep/models.hpp"

namespace levrep {

namespace {

constexpr double kSeriesLimit = 4.0;
constexpr double kAsymptoticLimit = 25.0;

double si_series(double x) {
  // sum_k (-1)^k x^{2k+1} / ((2k+1) (2k+1)!)
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int k = 1; k < 60; ++k) {
    term *= -x2 / ((2.0 * k) * (2.0 * k + 1));
    const double add = term / (2 * k + 1);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double si_continued_fraction(double x) {
  // E1(ix) by modified Lentz; Si(x) = pi/2 + Im[E1(ix)] for x > 0.
  using cd = std::complex<double>;
  constexpr double tiny = 1e-300;
  cd b(1.0, x);
  cd c = 1.0 / tiny;
  cd d = 1.0 / b;
  cd h = d;
  for (int i = 2; i < 1000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const cd del = c * d;
    h *= del;
    if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < 1e-16) break;
  }
  h *= cd(std::cos(x), -std::sin(x));
  return std::numbers::pi / 2 + h.imag();
}

double si_asymptotic(double x) {
  // Si = pi/2 - f cos x - g sin x,
  // f ~ (1/x) sum (-1)^k (2k)!/x^{2k},  g ~ (1/x^2) sum (-1)^k (2k+1)!/x^{2k}.
  const double inv2 = 1 / (x * x);
  double f = 0, g = 0;
  double tf = 1, tg = 1;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 40; ++k) {
    if (k > 0) {
      tf *= -(2.0 * k - 1) * (2.0 * k) * inv2;
      tg *= -(2.0 * k) * (2.0 * k + 1) * inv2;
    }
    const double size = std::abs(tf) + std::abs(tg);
    if (size > prev) break;  // optimal truncation
    f += tf;
    g += tg;
    prev = size;
    if (size < 1e-17) break;
  }
  f /= x;
  g *= inv2;
  return std::numbers::pi / 2 - f * std::cos(x) - g * std::sin(x);
}

}  // namespace

double sine_integral(double x) {
  if (std::isnan(x)) return x;
  if (x < 0) return -sine_integral(-x);
  if (std::isinf(x)) return std::numbers::pi / 2;
  if (x <= kSeriesLimit) return si_series(x);
  if (x <= kAsymptoticLimit) return si_continued_fraction(x);
  return si_asymptotic(x);
}

}  // namespace levrep
