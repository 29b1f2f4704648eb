#include "alphalda/divergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace alphalda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_measure_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("measures must have the same length");
  }
  bool p_positive = false, q_positive = false;
  for (double w : p) {
    if (w < 0.0) throw std::invalid_argument("measure weights must be >= 0");
    p_positive = p_positive || w > 0.0;
  }
  for (double w : q) {
    if (w < 0.0) throw std::invalid_argument("measure weights must be >= 0");
    q_positive = q_positive || w > 0.0;
  }
  if (!p_positive && !q_positive) {
    throw std::invalid_argument("both measures are zero");
  }
}

// x^a with the 0^a := 0 (a > 0) convention; 0^a for a <= 0 diverges.
double pow_conv(double x, double a) {
  if (x == 0.0) return a > 0.0 ? 0.0 : kInf;
  return std::pow(x, a);
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  check_measure_pair(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      if (q[i] == 0.0) return kInf;
      acc += p[i] * std::log(p[i] / q[i]);
    }
    acc += q[i] - p[i];
  }
  return acc;
}

double alpha_divergence(std::span<const double> p, std::span<const double> q,
                        AlphaValue alpha) {
  if (alpha.near_zero()) return kl_divergence(q, p);
  if (alpha.near_one()) return kl_divergence(p, q);

  check_measure_pair(p, q);
  const double a = alpha.value;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double cross;
    if (p[i] == 0.0 && q[i] == 0.0) {
      cross = 0.0;
    } else {
      cross = pow_conv(p[i], a) * pow_conv(q[i], 1.0 - a);
    }
    if (std::isinf(cross)) return kInf;
    acc += a * p[i] + (1.0 - a) * q[i] - cross;
  }
  // nonnegative by Jensen; the floor only ever removes rounding residue
  return std::max(acc / (a * (1.0 - a)), 0.0);
}

double named_divergence(std::span<const double> p, std::span<const double> q,
                        NamedDivergence kind) {
  check_measure_pair(p, q);
  double acc = 0.0;
  switch (kind) {
    case NamedDivergence::kHellinger:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = std::sqrt(q[i]) - std::sqrt(p[i]);
        acc += diff * diff;
      }
      return 2.0 * acc;
    case NamedDivergence::kChiSquare:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = p[i] - q[i];
        if (q[i] == 0.0) {
          if (diff != 0.0) return kInf;
          continue;
        }
        acc += diff * diff / q[i];
      }
      return 0.5 * acc;
    case NamedDivergence::kInverseChiSquare:
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double diff = q[i] - p[i];
        if (p[i] == 0.0) {
          if (diff != 0.0) return kInf;
          continue;
        }
        acc += diff * diff / p[i];
      }
      return 0.5 * acc;
  }
  throw std::invalid_argument("unknown named divergence");
}

double power_mean(const DiscreteRandomVariable& x, AlphaValue alpha) {
  if (x.outcomes.size() != x.probs.size() || x.outcomes.empty()) {
    throw std::invalid_argument("outcomes and probs must match and be nonempty");
  }
  double prob_total = 0.0;
  for (std::size_t i = 0; i < x.outcomes.size(); ++i) {
    if (x.outcomes[i] < 0.0) {
      throw std::invalid_argument("outcomes must be nonnegative");
    }
    if (x.probs[i] < 0.0) throw std::invalid_argument("probs must be >= 0");
    prob_total += x.probs[i];
  }
  if (std::abs(prob_total - 1.0) > 1e-12) {
    throw std::invalid_argument("probs must sum to 1");
  }

  if (alpha.near_zero()) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.outcomes.size(); ++i) {
      if (x.probs[i] == 0.0) continue;
      if (x.outcomes[i] == 0.0) {
        throw std::domain_error("zero outcome requires alpha > 0");
      }
      acc += x.probs[i] * std::log(x.outcomes[i]);
    }
    return std::exp(acc);
  }

  const double a = alpha.value;
  double acc = 0.0;
  for (std::size_t i = 0; i < x.outcomes.size(); ++i) {
    if (x.probs[i] == 0.0) continue;
    if (x.outcomes[i] == 0.0) {
      if (a < 0.0) throw std::domain_error("zero outcome requires alpha > 0");
      continue;
    }
    acc += x.probs[i] * std::pow(x.outcomes[i], a);
  }
  return std::pow(acc, 1.0 / a);
}

}  // namespace alphalda
