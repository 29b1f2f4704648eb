#include "alphalda/enumeration.hpp"

#include <cmath>
#include <stdexcept>

namespace alphalda {

std::vector<double> local_projection_oracle(const TinyCollapsedModel& model,
                                            int d, int32_t i,
                                            ProjectionFactor factor,
                                            AlphaValue alpha) {
  const int T = model.topics();
  const int64_t n = model.tokens();
  if (n > TinyCollapsedModel::kTokenCap || T > TinyCollapsedModel::kTopicCap) {
    throw std::invalid_argument("enumeration budget exceeded");
  }
  model.hyper.validate();

  // Locate the excluded token and collect the others.
  int64_t excluded = -1;
  for (int64_t f = model.view.doc_begin(d); f < model.view.doc_end(d); ++f) {
    if (model.view.position[f] == i) {
      excluded = f;
      break;
    }
  }
  if (excluded < 0) throw std::invalid_argument("no such token (d, i)");
  const int32_t target_word = model.view.word[excluded];

  struct Other {
    const double* q;
    bool in_doc;
    bool same_word;
  };
  std::vector<Other> others;
  others.reserve(n - 1);
  for (int doc = 0; doc < model.view.D; ++doc) {
    for (int64_t f = model.view.doc_begin(doc); f < model.view.doc_end(doc);
         ++f) {
      if (f == excluded) continue;
      others.push_back({model.q.at(f).data(), doc == d,
                        model.view.word[f] == target_word});
    }
  }

  const int m = static_cast<int>(others.size());
  const double vbeta = model.hyper.vbeta();
  const bool log_branch = alpha.near_zero();
  const double a = alpha.value;

  std::vector<double> acc(T, 0.0);
  std::vector<int> digits(m, 0);     // current joint assignment
  std::vector<int> count(T);         // factor-relevant counts per topic

  // Odometer over all T^m assignments; counts recomputed per state keeps
  // the oracle independent of the incremental bookkeeping it validates.
  while (true) {
    double prob = 1.0;
    std::fill(count.begin(), count.end(), 0);
    for (int j = 0; j < m; ++j) {
      const int t = digits[j];
      prob *= others[j].q[t];
      switch (factor) {
        case ProjectionFactor::kDoc:
          if (others[j].in_doc) ++count[t];
          break;
        case ProjectionFactor::kWord:
          if (others[j].same_word) ++count[t];
          break;
        case ProjectionFactor::kTopicTotal:
          ++count[t];
          break;
      }
    }
    for (int t = 0; t < T; ++t) {
      double g;
      switch (factor) {
        case ProjectionFactor::kDoc:
          g = count[t] + model.hyper.gamma[t];
          break;
        case ProjectionFactor::kWord:
          g = count[t] + model.hyper.beta;
          break;
        default:
          g = 1.0 / (count[t] + vbeta);
          break;
      }
      acc[t] += prob * (log_branch ? std::log(g) : std::pow(g, a));
    }

    int j = 0;
    while (j < m && ++digits[j] == T) digits[j++] = 0;
    if (j == m) break;
  }

  for (int t = 0; t < T; ++t) {
    acc[t] = log_branch ? std::exp(acc[t]) : std::pow(acc[t], 1.0 / a);
  }
  return acc;
}

}  // namespace alphalda
