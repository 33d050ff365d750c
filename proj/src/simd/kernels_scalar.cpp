#include <cmath>
#include <stdexcept>

#include "levrep/simd/kernels.hpp"

namespace levrep::simd::scalar {

double lattice_row_sum(double a, std::span<const double> b, double k, double L) {
  double acc = 0;
  for (const double bj : b) {
    const double q = a + bj;
    const double root = std::sqrt(q);
    const double h = std::sin(0.5 * k * root * L);
    acc += 2 * h * h / (q * root);
  }
  return acc;
}

double sin_sum(std::span<const double> w, std::span<const double> t, double x) {
  if (w.size() != t.size()) throw std::invalid_argument("weight/frequency length mismatch");
  double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * std::sin(t[i] * x);
  return acc;
}

}  // namespace levrep::simd::scalar
