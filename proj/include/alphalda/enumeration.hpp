#pragma once

#include <vector>

#include "alphalda/corpus.hpp"
#include "alphalda/divergence.hpp"
#include "alphalda/stats.hpp"

namespace alphalda {

// A corpus small enough to enumerate every joint topic assignment, plus a
// fully factorized posterior over its tokens. Used as the ground-truth
// oracle for the projection closed forms.
struct TinyCollapsedModel {
  static constexpr int kTokenCap = 12;
  static constexpr int kTopicCap = 3;

  Corpus corpus;
  Hyperparams hyper;
  TrainView view;       // covering the whole corpus
  TokenPosterior q;     // one row per token

  int topics() const { return q.T; }
  int64_t tokens() const { return view.total_tokens(); }
};

enum class ProjectionFactor { kDoc, kWord, kTopicTotal };

// Exact power-mean of the projection target under q(z^{\d,i}), one value per
// topic, by enumerating all T^(n-1) assignments of the remaining tokens:
//   kDoc        g_t = n_dt^{\d,i} + gamma_t
//   kWord       g_t = n_tv^{\d,i} + beta          (v = the excluded token's word)
//   kTopicTotal g_t = 1 / (n_t^{\d,i} + V beta)
// Returns E[g_t^alpha]^(1/alpha), with exp(E[log g_t]) on the alpha -> 0
// branch. Throws when the model exceeds the enumeration budget.
std::vector<double> local_projection_oracle(const TinyCollapsedModel& model,
                                            int d, int32_t i,
                                            ProjectionFactor factor,
                                            AlphaValue alpha);

}  // namespace alphalda
