// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>
#include <stdexcept>

#include "levrep/simd/kernels.hpp"

namespace levrep::simd::avx2 {

namespace {

// pi/2 split into three doubles for Cody-Waite reduction with FMA.
constexpr double kPio2Hi = 1.5707963267948965579989817342720925807952880859375;
constexpr double kPio2Mid = 6.123233995736766035868820147291818e-17;
constexpr double kPio2Lo = -1.4973849048591698e-33;
constexpr double kTwoOverPi = 0.63661977236758134307553505349005744813783858296182;

// fdlibm minimax kernels on |r| <= pi/4.
constexpr double S1 = -1.66666666666666324348e-01;
constexpr double S2 = 8.33333333332248946124e-03;
constexpr double S3 = -1.98412698298579493134e-04;
constexpr double S4 = 2.75573137070700676789e-06;
constexpr double S5 = -2.50507602534068634195e-08;
constexpr double S6 = 1.58969099521155010221e-10;

constexpr double C1 = 4.16666666666666019037e-02;
constexpr double C2 = -1.38888888888741095749e-03;
constexpr double C3 = 2.48015872894767294178e-05;
constexpr double C4 = -2.75573143513906633035e-07;
constexpr double C5 = 2.08757232129817482790e-09;
constexpr double C6 = -1.13596475577881948265e-11;

inline __m256d poly_sin(__m256d r) {
  const __m256d z = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(S6);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(S5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(S4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(S3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(S2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(S1));
  return _mm256_fmadd_pd(_mm256_mul_pd(p, z), r, r);
}

inline __m256d poly_cos(__m256d r) {
  const __m256d z = _mm256_mul_pd(r, r);
  __m256d p = _mm256_set1_pd(C6);
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(C5));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(C4));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(C3));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(C2));
  p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(C1));
  const __m256d z2 = _mm256_mul_pd(z, z);
  const __m256d head = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, _mm256_set1_pd(1.0));
  return _mm256_fmadd_pd(z2, p, head);
}

// sin(y) for |y| up to ~1e9; larger arguments lose accuracy in the reduction.
inline __m256d vsin(__m256d y) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(kTwoOverPi)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2Hi), y);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2Mid), r);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(kPio2Lo), r);

  // Quadrant from the low bits of k (exact in int64 for |k| < 2^51).
  const __m256d magic = _mm256_set1_pd(0x1.8p52);
  const __m256i q = _mm256_castpd_si256(_mm256_add_pd(k, magic));
  const __m256i one = _mm256_set1_epi64x(1);
  const __m256i two = _mm256_set1_epi64x(2);
  const __m256d use_cos = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
  const __m256d negate = _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));

  const __m256d s = poly_sin(r);
  const __m256d c = poly_cos(r);
  const __m256d v = _mm256_blendv_pd(s, c, use_cos);
  return _mm256_xor_pd(v, _mm256_and_pd(negate, _mm256_set1_pd(-0.0)));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double lattice_row_sum(double a, std::span<const double> b, double k, double L) {
  const std::size_t n = b.size();
  const __m256d av = _mm256_set1_pd(a);
  const __m256d half_kl = _mm256_set1_pd(0.5 * k * L);
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d q0 = _mm256_add_pd(av, _mm256_loadu_pd(b.data() + i));
    const __m256d q1 = _mm256_add_pd(av, _mm256_loadu_pd(b.data() + i + 4));
    const __m256d r0 = _mm256_sqrt_pd(q0);
    const __m256d r1 = _mm256_sqrt_pd(q1);
    const __m256d h0 = vsin(_mm256_mul_pd(r0, half_kl));
    const __m256d h1 = vsin(_mm256_mul_pd(r1, half_kl));
    const __m256d w0 = _mm256_div_pd(two, _mm256_mul_pd(q0, r0));
    const __m256d w1 = _mm256_div_pd(two, _mm256_mul_pd(q1, r1));
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(w0, h0), h0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(w1, h1), h1, acc1);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double q = a + b[i];
    const double root = std::sqrt(q);
    const double h = std::sin(0.5 * k * root * L);
    acc += 2 * h * h / (q * root);
  }
  return acc;
}

double sin_sum(std::span<const double> w, std::span<const double> t, double x) {
  if (w.size() != t.size()) throw std::invalid_argument("weight/frequency length mismatch");
  const std::size_t n = w.size();
  const __m256d xv = _mm256_set1_pd(x);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = vsin(_mm256_mul_pd(_mm256_loadu_pd(t.data() + i), xv));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), s, acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) total += w[i] * std::sin(t[i] * x);
  return total;
}

}  // namespace levrep::simd::avx2
