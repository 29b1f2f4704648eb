#pragma once

#include <span>
#include <vector>

#include "alphalda/corpus.hpp"
#include "alphalda/stats.hpp"

namespace alphalda {

// Smoothed plug-in estimates:
//   theta[d,t] = (E[n_dt] + gamma_t) / (n_d + sum gamma)
//   phi[t,v]   = (E[n_tv] + beta)    / (E[n_t] + V beta)
// phi is stored word-major (one length-T row per v) so scoring a token is a
// contiguous dot product.
struct PointEstimates {
  int D = 0, V = 0, T = 0;
  std::vector<double> theta;  // D x T
  std::vector<double> phi;    // V x T, word-major

  std::span<const double> theta_row(int d) const {
    return {theta.data() + static_cast<std::size_t>(d) * T,
            static_cast<std::size_t>(T)};
  }
  std::span<const double> phi_word_row(int v) const {
    return {phi.data() + static_cast<std::size_t>(v) * T,
            static_cast<std::size_t>(T)};
  }
  double phi_at(int t, int v) const {
    return phi[static_cast<std::size_t>(v) * T + t];
  }
};

PointEstimates point_estimates(const MomentTable& m, const Hyperparams& h);
// Gibbs variant: expectations replaced by the integer count tables.
PointEstimates point_estimates(const HardAssignment& counts,
                               const Hyperparams& h);

// exp(-(1/N_test) sum over held-out tokens of log sum_t theta[d,t] phi[t,w]).
// Throws when the split holds out nothing.
double perplexity(const PointEstimates& est, const Corpus& corpus,
                  const HoldoutSplit& split);

// The ratio V[n_t] / (E[n_t] + V beta)^2 whose smallness keeps the
// inverse-chi-square c factor close to the alpha = 1 expectation.
struct SecondTermDiagnostic {
  double max_ratio = 0.0;
  std::vector<double> per_topic;
};

SecondTermDiagnostic second_term_diagnostic(const MomentTable& m, double beta,
                                            int vocab_size);

}  // namespace alphalda
