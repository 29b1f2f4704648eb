#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "alphalda/evaluation.hpp"
#include "alphalda/experiment.hpp"
#include "helpers.hpp"

using namespace alphalda;

namespace {

// D documents, no covered tokens: the prior-only moment table.
MomentTable empty_moments(int D, int V, int T) {
  TrainView view;
  view.D = D;
  view.V = V;
  view.doc_offset.assign(D + 1, 0);
  TokenPosterior q;
  q.T = T;
  return MomentTable::from_tokens(view, q, false);
}

}  // namespace

TEST_CASE("point estimates: prior-only tables") {
  Hyperparams h;
  h.gamma = {0.6, 0.2, 0.2};
  h.beta = 0.01;
  h.vocab_size = 5;
  const PointEstimates est = point_estimates(empty_moments(2, 5, 3), h);
  CHECK(est.theta_row(0)[0] == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(est.theta_row(1)[2] == doctest::Approx(0.2).epsilon(1e-13));
  for (int v = 0; v < 5; ++v) {
    CHECK(est.phi_at(0, v) == doctest::Approx(0.2).epsilon(1e-13));
  }
}

TEST_CASE("point estimates: rows are stochastic for random tables") {
  std::mt19937_64 rng(81);
  const SyntheticCorpus synth = synthesize_lda_corpus(
      4, 20, 30, 25, std::vector<double>(4, 0.5), 0.1, 82);
  const TrainView view = TrainView::covering(synth.corpus);
  const TokenPosterior q = TokenPosterior::random_init(view, 4, rng);
  const MomentTable m = MomentTable::from_tokens(view, q, false);
  Hyperparams h;
  h.gamma = {0.3, 0.5, 0.2, 0.9};
  h.beta = 0.05;
  h.vocab_size = 30;
  const PointEstimates est = point_estimates(m, h);
  for (int d = 0; d < est.D; ++d) {
    double s = 0.0;
    for (int t = 0; t < est.T; ++t) s += est.theta_row(d)[t];
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (int t = 0; t < est.T; ++t) {
    double s = 0.0;
    for (int v = 0; v < est.V; ++v) s += est.phi_at(t, v);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    for (int v = 0; v < est.V; ++v) CHECK(est.phi_at(t, v) > 0.0);
  }
}

TEST_CASE("point estimates: single topic reduces to smoothed frequencies") {
  const Corpus corpus = testutil::make_corpus({{0, 0, 1}, {2, 0}}, 3);
  const TrainView view = TrainView::covering(corpus);
  TokenPosterior q;
  q.T = 1;
  q.q.assign(view.total_tokens(), 1.0);
  const MomentTable m = MomentTable::from_tokens(view, q, false);
  Hyperparams h;
  h.gamma = {0.5};
  h.beta = 0.1;
  h.vocab_size = 3;
  const PointEstimates est = point_estimates(m, h);
  CHECK(est.phi_at(0, 0) == doctest::Approx((3 + 0.1) / (5 + 0.3)));
  CHECK(est.phi_at(0, 1) == doctest::Approx((1 + 0.1) / (5 + 0.3)));
  CHECK(est.phi_at(0, 2) == doctest::Approx((1 + 0.1) / (5 + 0.3)));
}

TEST_CASE("perplexity: uniform predictive scores V, perfect scores 1") {
  const Corpus corpus = testutil::make_corpus({{0, 3, 2}}, 5);
  HoldoutSplit split;
  split.train_indices = {{}};
  split.test_indices = {{0, 1, 2}};
  split.test_total = 3;

  Hyperparams h;
  h.gamma = {1.0};
  h.beta = 0.2;
  h.vocab_size = 5;
  const PointEstimates uniform = point_estimates(empty_moments(1, 5, 1), h);
  CHECK(perplexity(uniform, corpus, split) ==
        doctest::Approx(5.0).epsilon(1e-12));

  const Corpus one = testutil::make_corpus({{2, 2}}, 3);
  HoldoutSplit one_split;
  one_split.train_indices = {{0}};
  one_split.test_indices = {{1}};
  one_split.test_total = 1;
  PointEstimates perfect;
  perfect.D = 1;
  perfect.V = 3;
  perfect.T = 1;
  perfect.theta = {1.0};
  perfect.phi = {0.0, 0.0, 1.0};
  CHECK(perplexity(perfect, one, one_split) == doctest::Approx(1.0));

  HoldoutSplit empty_split;
  empty_split.train_indices = {{0, 1}};
  empty_split.test_indices = {{}};
  CHECK_THROWS_AS(perplexity(perfect, one, empty_split),
                  std::invalid_argument);
}

TEST_CASE("perplexity is invariant to a joint topic permutation") {
  std::mt19937_64 rng(83);
  const Corpus corpus = testutil::make_corpus({{0, 1, 2, 3}, {3, 2, 1}}, 4);
  const HoldoutSplit split = split_holdout(corpus, 0.4, 83);

  PointEstimates est;
  est.D = 2;
  est.V = 4;
  est.T = 3;
  est.theta.resize(6);
  est.phi.resize(12);
  for (int d = 0; d < 2; ++d) {
    const auto row = testutil::random_distribution(3, rng);
    std::copy(row.begin(), row.end(), est.theta.begin() + d * 3);
  }
  std::vector<std::vector<double>> phi_rows;
  for (int t = 0; t < 3; ++t) phi_rows.push_back(testutil::random_distribution(4, rng));
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 3; ++t) est.phi[v * 3 + t] = phi_rows[t][v];
  }

  PointEstimates permuted = est;
  const int perm[3] = {2, 0, 1};
  for (int d = 0; d < 2; ++d) {
    for (int t = 0; t < 3; ++t) {
      permuted.theta[d * 3 + perm[t]] = est.theta[d * 3 + t];
    }
  }
  for (int v = 0; v < 4; ++v) {
    for (int t = 0; t < 3; ++t) {
      permuted.phi[v * 3 + perm[t]] = est.phi[v * 3 + t];
    }
  }
  CHECK(perplexity(permuted, corpus, split) ==
        doctest::Approx(perplexity(est, corpus, split)).epsilon(1e-12));
}

TEST_CASE("second-term diagnostic: worst case is order 1/n, degenerate is 0") {
  const int n = 400;
  std::vector<std::vector<int32_t>> docs(4, std::vector<int32_t>(n / 4, 0));
  const Corpus corpus = testutil::make_corpus(docs, 1);
  const TrainView view = TrainView::covering(corpus);

  TokenPosterior half;
  half.T = 2;
  half.q.assign(n * 2, 0.5);
  const MomentTable m_half = MomentTable::from_tokens(view, half, true);
  const SecondTermDiagnostic worst = second_term_diagnostic(m_half, 0.01, 1);
  CHECK(worst.max_ratio ==
        doctest::Approx((n / 4.0) / std::pow(n / 2.0 + 0.01, 2.0))
            .epsilon(1e-10));
  CHECK(worst.max_ratio < 1.1 / n * 2.0);

  TokenPosterior hard;
  hard.T = 2;
  hard.q.resize(n * 2);
  for (int i = 0; i < n; ++i) {
    hard.q[i * 2] = 1.0;
    hard.q[i * 2 + 1] = 0.0;
  }
  const MomentTable m_hard = MomentTable::from_tokens(view, hard, true);
  CHECK(second_term_diagnostic(m_hard, 0.01, 1).max_ratio == 0.0);

  const MomentTable no_var = MomentTable::from_tokens(view, half, false);
  CHECK_THROWS_AS(second_term_diagnostic(no_var, 0.01, 1),
                  std::invalid_argument);
}

TEST_CASE("averaged experiment: single run, determinism, grouping") {
  const SyntheticCorpus synth = synthesize_lda_corpus(
      2, 10, 15, 12, std::vector<double>(2, 0.5), 0.1, 84);
  InferenceConfig base;
  base.topics = 2;
  base.iterations = 3;
  base.seed = 84;
  base.gamma = {0.5, 0.5};
  base.beta = 0.05;

  const std::vector<AlgorithmKind> algs{AlgorithmKind::kCvb0,
                                        AlgorithmKind::kGibbs};
  const ExperimentResult single =
      averaged_experiment(base, algs, synth.corpus, 0.2, 1, false);
  REQUIRE(single.summaries.size() == 2);
  CHECK(single.summaries[0].std_perplexity == 0.0);
  CHECK(single.summaries[0].mean_perplexity ==
        single.runs[0].trace.back().perplexity);

  const ExperimentResult twice =
      averaged_experiment(base, algs, synth.corpus, 0.2, 2, false);
  CHECK(twice.trace.size() == 2 * 2 * 4);  // runs x algs x (iters + anchor)
  const ExperimentResult again =
      averaged_experiment(base, algs, synth.corpus, 0.2, 2, false);
  for (std::size_t i = 0; i < twice.summaries.size(); ++i) {
    CHECK(twice.summaries[i].mean_perplexity ==
          again.summaries[i].mean_perplexity);
    CHECK(twice.summaries[i].std_perplexity ==
          again.summaries[i].std_perplexity);
  }

  CHECK_THROWS_AS(averaged_experiment(base, algs, synth.corpus, 0.2, 0),
                  std::invalid_argument);
}

TEST_CASE("trace csv: empty, single record, exact round-trip") {
  std::ostringstream empty;
  write_trace_csv(empty, {});
  CHECK(empty.str() == "run,seed,iteration,algorithm,perplexity,seconds\n");

  std::vector<TraceRecord> one{{0, 42, 7, AlgorithmKind::kCvb1s,
                                1234.5678901234567, 0.25}};
  std::ostringstream out;
  write_trace_csv(out, one);
  const std::string text = out.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);

  std::mt19937_64 rng(85);
  std::uniform_real_distribution<double> val(1.0, 1e4);
  std::vector<TraceRecord> trace;
  for (int i = 0; i < 25; ++i) {
    trace.push_back({i % 5, 1000 + static_cast<uint64_t>(i), i / 5,
                     kAllAlgorithms[i % 6], val(rng), val(rng) * 1e-3});
  }
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  std::istringstream in(csv.str());
  const std::vector<TraceRecord> parsed = parse_trace_csv(in);
  REQUIRE(parsed.size() == trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(parsed[i].run == trace[i].run);
    CHECK(parsed[i].seed == trace[i].seed);
    CHECK(parsed[i].iteration == trace[i].iteration);
    CHECK(parsed[i].algorithm == trace[i].algorithm);
    CHECK(parsed[i].perplexity == trace[i].perplexity);  // 17 digits round-trip
    CHECK(parsed[i].seconds == trace[i].seconds);
  }
}

TEST_CASE("summary csv format") {
  std::vector<AlgorithmSummary> summaries{
      {AlgorithmKind::kCvb0, 815.25, 3.5},
      {AlgorithmKind::kGibbs, 820.0, 4.25},
  };
  std::ostringstream out;
  write_summary_csv(out, summaries);
  CHECK(out.str() ==
        "algorithm,mean_perplexity,std_perplexity\n"
        "cvb0,815.25,3.5\n"
        "gibbs,820,4.25\n");
}

TEST_CASE("greedy recovery: a permuted copy of phi scores 1") {
  std::mt19937_64 rng(86);
  const int T = 4, V = 12;
  std::vector<double> phi_true(T * V);
  for (int t = 0; t < T; ++t) {
    const auto row = testutil::random_distribution(V, rng);
    std::copy(row.begin(), row.end(), phi_true.begin() + t * V);
  }
  PointEstimates est;
  est.D = 1;
  est.V = V;
  est.T = T;
  est.theta.assign(T, 1.0 / T);
  est.phi.resize(V * T);
  const int perm[4] = {3, 1, 0, 2};
  for (int t = 0; t < T; ++t) {
    for (int v = 0; v < V; ++v) {
      est.phi[v * T + perm[t]] = phi_true[t * V + v];
    }
  }
  std::vector<double> per_topic;
  const double mean = greedy_phi_recovery(phi_true, T, V, est, &per_topic);
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(per_topic.size() == 4);
  for (double c : per_topic) CHECK(c == doctest::Approx(1.0).epsilon(1e-12));
}
