#pragma once

#include <span>
#include <vector>

namespace alphalda {

// Index into the alpha-divergence family. Values within limit_epsilon of the
// removable singularities at 0 and 1 take the analytic KL limit branch.
struct AlphaValue {
  double value = 1.0;
  static constexpr double kLimitEpsilon = 1e-8;

  bool near_zero() const {
    return value > -kLimitEpsilon && value < kLimitEpsilon;
  }
  bool near_one() const {
    return value > 1.0 - kLimitEpsilon && value < 1.0 + kLimitEpsilon;
  }
};

// Generalized KL for unnormalized measures: sum p log(p/q) + sum(q - p).
// Support violations (p_i > 0 with q_i = 0) yield +infinity, not a throw.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// D_alpha[p||q] = sum[a p + (1-a) q - p^a q^(1-a)] / (a (1-a)) with the KL
// limits at a -> 0 (KL[q||p]) and a -> 1 (KL[p||q]). Measures need not be
// normalized; weights must be >= 0 and each measure nonzero somewhere.
double alpha_divergence(std::span<const double> p, std::span<const double> q,
                        AlphaValue alpha);

enum class NamedDivergence { kHellinger, kChiSquare, kInverseChiSquare };

// Closed forms for alpha = 0.5, 2 and -1:
//   hellinger  2 sum (sqrt(q) - sqrt(p))^2
//   chi2       (1/2) sum (p - q)^2 / q
//   inv_chi2   (1/2) sum (q - p)^2 / p
double named_divergence(std::span<const double> p, std::span<const double> q,
                        NamedDivergence kind);

// Finite nonnegative random variable for the power-mean machinery.
struct DiscreteRandomVariable {
  std::vector<double> outcomes;  // >= 0
  std::vector<double> probs;     // sums to 1
};

// E[x^alpha]^(1/alpha); the alpha -> 0 branch returns exp(E[log x]).
// Monotone nondecreasing in alpha. Zero outcomes require alpha > 0.
double power_mean(const DiscreteRandomVariable& x, AlphaValue alpha);

}  // namespace alphalda
