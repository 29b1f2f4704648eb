#pragma once

#include <cstddef>

// Per-topic inner-loop kernels. Every hot loop of the inference sweeps runs
// over length-T double buffers through this table, so the scalar reference
// and the SIMD variants stay interchangeable and equivalence-testable.

namespace alphalda {
namespace kern {

struct Kernels {
  const char* name;

  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // x *= s
  void (*scale)(double* x, double s, std::size_t n);
  // y += a * x
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  // out = a - s * b
  void (*sub_scaled)(double* out, const double* a, double s, const double* b,
                     std::size_t n);
  // out = q * (1 - q), the Bernoulli variance of one token's posterior
  void (*var_delta)(double* out, const double* q, std::size_t n);
  // out = (ea + gamma) * (eb + beta) / (ec + vbeta), elementwise
  void (*cvb0_weights)(double* out, const double* ea, const double* gamma,
                       const double* eb, double beta, const double* ec,
                       double vbeta, std::size_t n);
  // w *= exp(-vb/(2(beta+eb)^2) + vc/(2(vbeta+ec)^2) - va/(2(gamma+ea)^2))
  void (*cvb_correction)(double* w, const double* ea, const double* gamma,
                         const double* va, const double* eb, double beta,
                         const double* vb, const double* ec, double vbeta,
                         const double* vc, std::size_t n);
};

enum class Backend { kAuto, kScalar, kAvx2 };

// Scalar reference implementation; always available.
const Kernels& scalar();
// AVX2 variant, or nullptr when the build or the CPU lacks it.
const Kernels* avx2();

// Kernel table picked by select_backend() (kAuto = best available).
const Kernels& active();
// Throws std::runtime_error when a forced backend is unavailable.
void select_backend(Backend b);
Backend selected_backend();

// x /= sum(x); returns the sum. Callers rely on sum(x) == 1 afterwards
// up to one rounding of the division.
inline double normalize(double* x, std::size_t n) {
  const Kernels& k = active();
  const double s = k.sum(x, n);
  k.scale(x, 1.0 / s, n);
  return s;
}

}  // namespace kern
}  // namespace alphalda
