// AVX2/FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless the CPU reports both.

#include <immintrin.h>

#include <cmath>
#include <numbers>

#include "tailrisk/simd/kernels.hpp"

namespace tailrisk::simd::avx2 {

namespace {

constexpr double kSqrt5 = 2.23606797749978969641;

// Cephes-style exp: range reduction by ln 2 split in two parts, rational
// approximation on [-ln2/2, ln2/2], exponent rebuilt from the integer part.
// Inputs below -708.39 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.39641853226408);
  const __m256d hi = _mm256_set1_pd(709.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634074)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125e-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212e-6), x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878e-4), xx,
                              _mm256_set1_pd(3.02994407707441961300e-2));
  p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910e-1));
  p = _mm256_mul_pd(p, x);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042e-6), xx,
                              _mm256_set1_pd(2.52448340349684104192e-3));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766e-1));
  q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009e0));
  __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  __m256i n = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(fx));
  n = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n));
  return _mm256_andnot_pd(underflow, r);
}

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void kernel_row(KernelFamily family, double sigma2, std::span<const double> inv_lengthscale,
                std::span<const double> x, ColumnPoints pts, std::span<double> out) {
  const std::size_t d = pts.cols;
  const std::size_t n = pts.rows;
  const __m256d vsig = _mm256_set1_pd(sigma2);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d third = _mm256_set1_pd(1.0 / 3.0);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d poly = one;
    __m256d expo = _mm256_setzero_pd();
    for (std::size_t j = 0; j < d; ++j) {
      const __m256d p = _mm256_loadu_pd(pts.data + j * pts.stride + i);
      const __m256d h = _mm256_mul_pd(_mm256_sub_pd(_mm256_set1_pd(x[j]), p),
                                      _mm256_set1_pd(inv_lengthscale[j]));
      if (family == KernelFamily::Matern52) {
        const __m256d t = _mm256_mul_pd(_mm256_set1_pd(kSqrt5), abs_pd(h));
        const __m256d f = _mm256_add_pd(_mm256_add_pd(one, t), _mm256_mul_pd(_mm256_mul_pd(t, t), third));
        poly = _mm256_mul_pd(poly, f);
        expo = _mm256_add_pd(expo, t);
      } else {
        expo = _mm256_fmadd_pd(_mm256_mul_pd(half, h), h, expo);
      }
    }
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), expo));
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_mul_pd(vsig, poly), e));
  }
  if (i < n) {
    ColumnPoints rest{pts.data + i, n - i, pts.cols, pts.stride};
    scalar::kernel_row(family, sigma2, inv_lengthscale, x, rest, out.subspan(i));
  }
}

void tmse_weights(std::span<const double> mean, std::span<const double> var, double level,
                  double eps2, std::span<double> out) {
  const std::size_t n = mean.size();
  const __m256d vl = _mm256_set1_pd(level);
  const __m256d ve = _mm256_set1_pd(eps2);
  const __m256d twopi = _mm256_set1_pd(2.0 * std::numbers::pi);
  const __m256d mhalf = _mm256_set1_pd(-0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(var.data() + i), ve);
    const __m256d u = _mm256_sub_pd(_mm256_loadu_pd(mean.data() + i), vl);
    const __m256d arg = _mm256_div_pd(_mm256_mul_pd(mhalf, _mm256_mul_pd(u, u)), v);
    const __m256d norm = _mm256_sqrt_pd(_mm256_mul_pd(twopi, v));
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(exp_pd(arg), norm));
  }
  if (i < n) {
    scalar::tmse_weights(mean.subspan(i), var.subspan(i), level, eps2, out.subspan(i));
  }
}

double timse_sum(std::span<const double> var, std::span<const double> cov,
                 std::span<const double> weight, double inv_denom) {
  const std::size_t n = var.size();
  const __m256d vd = _mm256_set1_pd(inv_denom);
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d c = _mm256_loadu_pd(cov.data() + i);
    const __m256d v = _mm256_max_pd(
        _mm256_fnmadd_pd(_mm256_mul_pd(c, c), vd, _mm256_loadu_pd(var.data() + i)), zero);
    acc = _mm256_fmadd_pd(v, _mm256_loadu_pd(weight.data() + i), acc);
  }
  double total = hsum(acc);
  if (i < n) {
    total += scalar::timse_sum(var.subspan(i), cov.subspan(i), weight.subspan(i), inv_denom);
  }
  return total;
}

void bs_payoff_batch(const BsPayoffCoeffs& c, std::span<const double> za, std::span<const double> zb,
                     std::span<const double> zc, std::span<double> out) {
  const std::size_t n = out.size();
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(za.data() + i);
    const __m256d b = _mm256_loadu_pd(zb.data() + i);
    const __m256d cc = _mm256_loadu_pd(zc.data() + i);
    const __m256d e1 = _mm256_fmadd_pd(_mm256_set1_pd(c.vol1), a, _mm256_set1_pd(c.drift1));
    __m256d e2 = _mm256_fmadd_pd(_mm256_set1_pd(c.vol2a), a, _mm256_set1_pd(c.drift2));
    e2 = _mm256_fmadd_pd(_mm256_set1_pd(c.vol2b), b, e2);
    e2 = _mm256_fmadd_pd(_mm256_set1_pd(c.vol2c), cc, e2);
    const __m256d s1 = _mm256_mul_pd(_mm256_set1_pd(c.spot1), exp_pd(e1));
    const __m256d s2 = _mm256_mul_pd(_mm256_set1_pd(c.spot2), exp_pd(e2));
    const __m256d p1 = _mm256_max_pd(_mm256_sub_pd(s1, _mm256_set1_pd(c.strike1)), zero);
    const __m256d p2 = _mm256_max_pd(_mm256_sub_pd(s2, _mm256_set1_pd(c.strike2)), zero);
    _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(_mm256_set1_pd(c.weight1), p1,
                                                      _mm256_mul_pd(_mm256_set1_pd(c.weight2), p2)));
  }
  if (i < n) {
    // Pad the tail so every draw goes through the same vector path regardless
    // of where it lands in the batch.
    alignas(32) double a[4] = {0, 0, 0, 0}, b[4] = {0, 0, 0, 0}, cc[4] = {0, 0, 0, 0}, o[4];
    const std::size_t m = n - i;
    for (std::size_t k = 0; k < m; ++k) {
      a[k] = za[i + k];
      b[k] = zb[i + k];
      cc[k] = zc[i + k];
    }
    avx2::bs_payoff_batch(c, std::span<const double>(a, 4), std::span<const double>(b, 4),
                          std::span<const double>(cc, 4), std::span<double>(o, 4));
    for (std::size_t k = 0; k < m; ++k) out[i + k] = o[k];
  }
}

}  // namespace tailrisk::simd::avx2
