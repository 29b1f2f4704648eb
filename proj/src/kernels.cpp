#include "alphalda/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace alphalda {
namespace kern {

namespace {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void scale_scalar(double* x, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= s;
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void sub_scaled_scalar(double* out, const double* a, double s, const double* b,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - s * b[i];
}

void var_delta_scalar(double* out, const double* q, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = q[i] * (1.0 - q[i]);
}

void cvb0_weights_scalar(double* out, const double* ea, const double* gamma,
                         const double* eb, double beta, const double* ec,
                         double vbeta, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (ea[i] + gamma[i]) * (eb[i] + beta) / (ec[i] + vbeta);
  }
}

void cvb_correction_scalar(double* w, const double* ea, const double* gamma,
                           const double* va, const double* eb, double beta,
                           const double* vb, const double* ec, double vbeta,
                           const double* vc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double da = gamma[i] + ea[i];
    const double db = beta + eb[i];
    const double dc = vbeta + ec[i];
    const double arg = -vb[i] / (2.0 * db * db) + vc[i] / (2.0 * dc * dc) -
                       va[i] / (2.0 * da * da);
    w[i] *= std::exp(arg);
  }
}

const Kernels kScalar = {
    "scalar",        sum_scalar,       dot_scalar,
    scale_scalar,    axpy_scalar,      sub_scaled_scalar,
    var_delta_scalar, cvb0_weights_scalar, cvb_correction_scalar,
};

Backend g_backend = Backend::kAuto;

const Kernels& resolve(Backend b) {
  switch (b) {
    case Backend::kScalar:
      return scalar();
    case Backend::kAvx2: {
      const Kernels* k = avx2();
      if (!k) throw std::runtime_error("avx2 kernels unavailable on this host");
      return *k;
    }
    case Backend::kAuto:
    default: {
      const Kernels* k = avx2();
      return k ? *k : scalar();
    }
  }
}

const Kernels* g_active = nullptr;

}  // namespace

const Kernels& scalar() { return kScalar; }

#if !defined(ALPHALDA_HAVE_AVX2)
const Kernels* avx2() { return nullptr; }
#endif

const Kernels& active() {
  if (!g_active) g_active = &resolve(g_backend);
  return *g_active;
}

void select_backend(Backend b) {
  g_active = &resolve(b);
  g_backend = b;
}

Backend selected_backend() { return g_backend; }

}  // namespace kern
}  // namespace alphalda
