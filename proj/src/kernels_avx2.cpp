// Built with -mavx2 -mfma; only reached after the runtime CPU check.
#include "cdrops/kernels.hpp"

#include <cmath>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace cdrops::kernels::avx2 {

namespace {

// log for positive normal doubles (fdlibm reduction and polynomial).
inline __m256d log_pd(__m256d x) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));
  // biased exponent as double via the 2^52 trick
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
  __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(ebits, magic)), _mm256_set1_pd(4503599627370496.0));
  e = _mm256_sub_pd(e, _mm256_set1_pd(1023.0));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_add_pd(e, _mm256_and_pd(big, one));

  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d hfsq = _mm256_mul_pd(_mm256_set1_pd(0.5), _mm256_mul_pd(f, f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  __m256d t1 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.531383769920937332e-01), _mm256_set1_pd(2.222219843214978396e-01));
  t1 = _mm256_fmadd_pd(w, t1, _mm256_set1_pd(3.999999999940941908e-01));
  t1 = _mm256_mul_pd(w, t1);
  __m256d t2 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.479819860511658591e-01), _mm256_set1_pd(1.818357216161805012e-01));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(2.857142874366239149e-01));
  t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(6.666666666666735130e-01));
  t2 = _mm256_mul_pd(z, t2);
  const __m256d R = _mm256_add_pd(t1, t2);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  // e*ln2_hi - ((hfsq - (s*(hfsq+R) + e*ln2_lo)) - f)
  const __m256d inner = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, R), _mm256_mul_pd(e, ln2_lo));
  const __m256d corr = _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f);
  return _mm256_fmsub_pd(e, ln2_hi, corr);
}

// exp for |y| < 700: y = k ln2 + r, Taylor polynomial of degree 13 on |r| <= ln2/2.
inline __m256d exp_pd(__m256d y) {
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(y, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, _mm256_set1_pd(6.93147180369123816490e-01), y);
  r = _mm256_fnmadd_pd(k, _mm256_set1_pd(1.90821492927058770002e-10), r);
  static constexpr double c[14] = {1.0,
                                   1.0,
                                   1.0 / 2,
                                   1.0 / 6,
                                   1.0 / 24,
                                   1.0 / 120,
                                   1.0 / 720,
                                   1.0 / 5040,
                                   1.0 / 40320,
                                   1.0 / 362880,
                                   1.0 / 3628800,
                                   1.0 / 39916800,
                                   1.0 / 479001600,
                                   1.0 / 6227020800.0};
  __m256d poly = _mm256_set1_pd(c[13]);
  for (int i = 12; i >= 0; --i) poly = _mm256_fmadd_pd(poly, r, _mm256_set1_pd(c[i]));
  // 2^k: round-to-int via the 1.5 * 2^52 shift, then place in the exponent field.
  const __m256d shift = _mm256_set1_pd(6755399441055744.0);
  const __m256i ki = _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(k, shift)), _mm256_castpd_si256(shift));
  const __m256i scale = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(poly, _mm256_castsi256_pd(scale));
}

// (d2)^p with zero where d2 == 0.
inline __m256d masked_pow(__m256d d2, __m256d p) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d pos = _mm256_cmp_pd(d2, zero, _CMP_GT_OQ);
  const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), d2, pos);
  return _mm256_and_pd(pos, exp_pd(_mm256_mul_pd(p, log_pd(safe))));
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

inline double scalar_pow(double d2, double p) { return d2 > 0.0 ? std::pow(d2, p) : 0.0; }

// sum_j wb_j (|a - b_j|^2)^p over j in [j0, nb)
inline double row_sum(double xa, double ya, const double* xb, const double* yb, const double* wb, std::size_t j0,
                      std::size_t nb, __m256d pv, double p) {
  const __m256d xi = _mm256_set1_pd(xa);
  const __m256d yi = _mm256_set1_pd(ya);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = j0;
  for (; j + 4 <= nb; j += 4) {
    const __m256d dx = _mm256_sub_pd(xi, _mm256_loadu_pd(xb + j));
    const __m256d dy = _mm256_sub_pd(yi, _mm256_loadu_pd(yb + j));
    const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(wb + j), masked_pow(d2, pv), acc);
  }
  double tail = 0.0;
  for (; j < nb; ++j) {
    const double dx = xa - xb[j];
    const double dy = ya - yb[j];
    tail += wb[j] * scalar_pow(dx * dx + dy * dy, p);
  }
  return hsum(acc) + tail;
}

}  // namespace

void pow_lanes(const double* d2, double p, double* out, std::size_t n) {
  const __m256d pv = _mm256_set1_pd(p);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, masked_pow(_mm256_loadu_pd(d2 + i), pv));
  if (i < n) {
    double buf[4] = {1.0, 1.0, 1.0, 1.0};
    for (std::size_t k = i; k < n; ++k) buf[k - i] = d2[k];
    double res[4];
    _mm256_storeu_pd(res, masked_pow(_mm256_loadu_pd(buf), pv));
    for (std::size_t k = i; k < n; ++k) out[k] = res[k - i];
  }
}

double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p) {
  const __m256d pv = _mm256_set1_pd(p);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += w[i] * row_sum(x[i], y[i], x, y, w, i + 1, n, pv, p);
  return total;
}

void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out) {
  const __m256d pv = _mm256_set1_pd(p);
  for (std::size_t i = 0; i < n; ++i) out[i] = row_sum(x[i], y[i], x, y, w, 0, n, pv, p);
}

double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p) {
  const __m256d pv = _mm256_set1_pd(p);
  double total = 0.0;
  for (std::size_t i = 0; i < na; ++i) total += wa[i] * row_sum(xa[i], ya[i], xb, yb, wb, 0, nb, pv, p);
  return total;
}

}  // namespace cdrops::kernels::avx2

#else

namespace cdrops::kernels::avx2 {

void pow_lanes(const double* d2, double p, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = d2[i] > 0.0 ? std::pow(d2[i], p) : 0.0;
}
double pair_sum(const double* x, const double* y, const double* w, std::size_t n, double p) {
  return scalar::pair_sum(x, y, w, n, p);
}
void potential(const double* x, const double* y, const double* w, std::size_t n, double p, double* out) {
  scalar::potential(x, y, w, n, p, out);
}
double cross_sum(const double* xa, const double* ya, const double* wa, std::size_t na, const double* xb,
                 const double* yb, const double* wb, std::size_t nb, double p) {
  return scalar::cross_sum(xa, ya, wa, na, xb, yb, wb, nb, p);
}

}  // namespace cdrops::kernels::avx2

#endif
