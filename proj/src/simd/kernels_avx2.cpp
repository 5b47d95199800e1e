// AVX2+FMA kernel variants. This file is the only translation unit compiled
// with -mavx2 -mfma; it must not be entered unless the CPU reports support.

#if defined(LINKANOMALY_HAVE_AVX2_TU) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace linkanomaly::simd::detail {

namespace {

// Sum of the four lanes of v.
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void matvec_avx2(const double* m, std::size_t n, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = dot_avx2(m + i * n, x, n);
}

void axpby_avx2(double* y, const double* x, std::size_t n, double alpha, double beta) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_mul_pd(va, _mm256_loadu_pd(y + i));
    vy = _mm256_fmadd_pd(vb, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] = alpha * y[i] + beta * x[i];
}

void sym_scale_rank1_avx2(double* m, std::size_t n, double s, double c, const double* u) {
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d vc = _mm256_set1_pd(c);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = m + i * n;
    const double ui = u[i];
    const __m256d vui = _mm256_set1_pd(ui);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      // u[i]*u[j] is rounded before the scale by c so that entries (i,j) and
      // (j,i) round identically; see the scalar variant.
      const __m256d vt = _mm256_mul_pd(vui, _mm256_loadu_pd(u + j));
      __m256d vr = _mm256_mul_pd(vs, _mm256_loadu_pd(row + j));
      vr = _mm256_fmadd_pd(vc, vt, vr);
      _mm256_storeu_pd(row + j, vr);
    }
    // The tail spells out the vector body's rounding, fma(c, u_i*u_j, s*m),
    // so an entry finished here still matches its vector-computed transpose
    // bit for bit.
    for (; j < n; ++j) row[j] = std::fma(c, ui * u[j], s * row[j]);
  }
}

}  // namespace linkanomaly::simd::detail

#endif
