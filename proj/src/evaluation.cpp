#include "alphalda/evaluation.hpp"

#include <cmath>
#include <stdexcept>

#include "alphalda/kernels.hpp"

namespace alphalda {

namespace {

// Normalizes theta rows by their actual sums and phi rows (over v, per t) by
// actual column sums, so the estimates are exactly row-stochastic even in
// the presence of the moment table's tolerated float drift.
PointEstimates estimates_impl(std::span<const double> e_dt,
                              std::span<const double> e_tv, int D, int V,
                              const Hyperparams& h) {
  const int T = h.topics();
  PointEstimates est;
  est.D = D;
  est.V = V;
  est.T = T;
  est.theta.resize(static_cast<std::size_t>(D) * T);
  est.phi.resize(static_cast<std::size_t>(V) * T);

  for (int d = 0; d < D; ++d) {
    const double* row = e_dt.data() + static_cast<std::size_t>(d) * T;
    double* out = est.theta.data() + static_cast<std::size_t>(d) * T;
    double denom = 0.0;
    for (int t = 0; t < T; ++t) {
      out[t] = row[t] + h.gamma[t];
      denom += out[t];
    }
    kern::active().scale(out, 1.0 / denom, T);
  }

  std::vector<double> denom(T, h.vbeta());
  for (int v = 0; v < V; ++v) {
    const double* row = e_tv.data() + static_cast<std::size_t>(v) * T;
    for (int t = 0; t < T; ++t) denom[t] += row[t];
  }
  for (int t = 0; t < T; ++t) denom[t] = 1.0 / denom[t];
  for (int v = 0; v < V; ++v) {
    const double* row = e_tv.data() + static_cast<std::size_t>(v) * T;
    double* out = est.phi.data() + static_cast<std::size_t>(v) * T;
    for (int t = 0; t < T; ++t) out[t] = (row[t] + h.beta) * denom[t];
  }
  return est;
}

}  // namespace

PointEstimates point_estimates(const MomentTable& m, const Hyperparams& h) {
  if (m.T() != h.topics() || m.V() != h.vocab_size) {
    throw std::invalid_argument("moment table and hyperparams disagree");
  }
  const std::span<const double> e_dt{m.doc_row(0).data(),
                                     static_cast<std::size_t>(m.D()) * m.T()};
  const std::span<const double> e_tv{m.word_row(0).data(),
                                     static_cast<std::size_t>(m.V()) * m.T()};
  return estimates_impl(e_dt, e_tv, m.D(), m.V(), h);
}

PointEstimates point_estimates(const HardAssignment& counts,
                               const Hyperparams& h) {
  const int T = counts.T;
  if (T != h.topics()) {
    throw std::invalid_argument("hard assignment and hyperparams disagree");
  }
  const int D = static_cast<int>(counts.n_dt.size()) / T;
  const int V = static_cast<int>(counts.n_tv.size()) / T;
  std::vector<double> e_dt(counts.n_dt.begin(), counts.n_dt.end());
  std::vector<double> e_tv(counts.n_tv.begin(), counts.n_tv.end());
  return estimates_impl(e_dt, e_tv, D, V, h);
}

double perplexity(const PointEstimates& est, const Corpus& corpus,
                  const HoldoutSplit& split) {
  if (split.test_total <= 0) {
    throw std::invalid_argument("holdout split has no test tokens");
  }
  const auto& k = kern::active();
  double log_sum = 0.0;
  for (int d = 0; d < corpus.num_documents(); ++d) {
    const auto theta = est.theta_row(d);
    for (int32_t pos : split.test_indices[d]) {
      const int32_t w = corpus.documents[d].tokens[pos];
      const double p = k.dot(theta.data(), est.phi_word_row(w).data(), est.T);
      log_sum += std::log(p);
    }
  }
  return std::exp(-log_sum / static_cast<double>(split.test_total));
}

SecondTermDiagnostic second_term_diagnostic(const MomentTable& m, double beta,
                                            int vocab_size) {
  if (!m.with_variances()) {
    throw std::invalid_argument("diagnostic requires variance tables");
  }
  SecondTermDiagnostic diag;
  diag.per_topic.resize(m.T());
  const double vbeta = beta * vocab_size;
  for (int t = 0; t < m.T(); ++t) {
    const double denom = m.topic_totals()[t] + vbeta;
    diag.per_topic[t] = m.topic_var_totals()[t] / (denom * denom);
    diag.max_ratio = std::max(diag.max_ratio, diag.per_topic[t]);
  }
  return diag;
}

}  // namespace alphalda
