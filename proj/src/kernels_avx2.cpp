// AVX2 variants of the per-topic kernels. This translation unit is the only
// one compiled with -mavx2; it must not be entered unless the CPU reports
// AVX2 support (the dispatcher in kernels.cpp checks before handing out the
// table). Elementwise kernels use plain mul/add/div, no FMA, so they match
// the scalar reference bit for bit; reductions differ only by summation
// order.

#include "alphalda/kernels.hpp"

#if defined(ALPHALDA_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace alphalda {
namespace kern {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(
        acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scale_avx2(double* x, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), vs));
  }
  for (; i < n; ++i) x[i] *= s;
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void sub_scaled_avx2(double* out, const double* a, double s, const double* b,
                     std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), prod));
  }
  for (; i < n; ++i) out[i] = a[i] - s * b[i];
}

void var_delta_avx2(double* out, const double* q, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vq = _mm256_loadu_pd(q + i);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vq, _mm256_sub_pd(one, vq)));
  }
  for (; i < n; ++i) out[i] = q[i] * (1.0 - q[i]);
}

void cvb0_weights_avx2(double* out, const double* ea, const double* gamma,
                       const double* eb, double beta, const double* ec,
                       double vbeta, std::size_t n) {
  const __m256d vbe = _mm256_set1_pd(beta);
  const __m256d vvb = _mm256_set1_pd(vbeta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d fa =
        _mm256_add_pd(_mm256_loadu_pd(ea + i), _mm256_loadu_pd(gamma + i));
    const __m256d fb = _mm256_add_pd(_mm256_loadu_pd(eb + i), vbe);
    const __m256d fc = _mm256_add_pd(_mm256_loadu_pd(ec + i), vvb);
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_mul_pd(fa, fb), fc));
  }
  for (; i < n; ++i) {
    out[i] = (ea[i] + gamma[i]) * (eb[i] + beta) / (ec[i] + vbeta);
  }
}

void cvb_correction_avx2(double* w, const double* ea, const double* gamma,
                         const double* va, const double* eb, double beta,
                         const double* vb, const double* ec, double vbeta,
                         const double* vc, std::size_t n) {
  // Vectorize the argument, leave exp() to libm one lane at a time.
  const __m256d vbe = _mm256_set1_pd(beta);
  const __m256d vvb = _mm256_set1_pd(vbeta);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d da =
        _mm256_add_pd(_mm256_loadu_pd(gamma + i), _mm256_loadu_pd(ea + i));
    const __m256d db = _mm256_add_pd(vbe, _mm256_loadu_pd(eb + i));
    const __m256d dc = _mm256_add_pd(vvb, _mm256_loadu_pd(ec + i));
    const __m256d ta = _mm256_div_pd(
        _mm256_loadu_pd(va + i), _mm256_mul_pd(two, _mm256_mul_pd(da, da)));
    const __m256d tb = _mm256_div_pd(
        _mm256_loadu_pd(vb + i), _mm256_mul_pd(two, _mm256_mul_pd(db, db)));
    const __m256d tc = _mm256_div_pd(
        _mm256_loadu_pd(vc + i), _mm256_mul_pd(two, _mm256_mul_pd(dc, dc)));
    double arg[4];
    _mm256_storeu_pd(arg, _mm256_sub_pd(_mm256_sub_pd(tc, tb), ta));
    for (int l = 0; l < 4; ++l) w[i + l] *= std::exp(arg[l]);
  }
  for (; i < n; ++i) {
    const double da = gamma[i] + ea[i];
    const double db = beta + eb[i];
    const double dc = vbeta + ec[i];
    const double arg = -vb[i] / (2.0 * db * db) + vc[i] / (2.0 * dc * dc) -
                       va[i] / (2.0 * da * da);
    w[i] *= std::exp(arg);
  }
}

const Kernels kAvx2 = {
    "avx2",         sum_avx2,       dot_avx2,
    scale_avx2,     axpy_avx2,      sub_scaled_avx2,
    var_delta_avx2, cvb0_weights_avx2, cvb_correction_avx2,
};

}  // namespace

const Kernels* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace kern
}  // namespace alphalda

#endif  // ALPHALDA_HAVE_AVX2
