#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "alphalda/inference.hpp"

namespace alphalda {

struct TraceRecord {
  int run = 0;
  uint64_t seed = 0;
  int iteration = 0;
  AlgorithmKind algorithm = AlgorithmKind::kCvb0;
  double perplexity = 0.0;
  double seconds = 0.0;
};

struct AlgorithmSummary {
  AlgorithmKind algorithm = AlgorithmKind::kCvb0;
  double mean_perplexity = 0.0;  // of final-iteration perplexity across runs
  double std_perplexity = 0.0;   // sample std, 0 for a single run
};

struct RunResult {
  AlgorithmKind algorithm = AlgorithmKind::kCvb0;
  int run = 0;
  uint64_t seed = 0;
  std::vector<IterationRecord> trace;
  PointEstimates final_estimates;
};

struct ExperimentResult {
  std::vector<TraceRecord> trace;
  std::vector<AlgorithmSummary> summaries;
  std::vector<RunResult> runs;
};

// n_runs seeded runs per algorithm: run r uses seed base.seed + r and its own
// holdout split (also seeded base.seed + r, shared across algorithms so they
// compete on identical data).
ExperimentResult averaged_experiment(const InferenceConfig& base,
                                     std::span<const AlgorithmKind> algorithms,
                                     const Corpus& corpus, double holdout_ratio,
                                     int n_runs, bool record_wall_time = true);

// Locale-independent decimal formatting with 17 significant digits, enough
// to round-trip any double.
std::string format_double(double value);

// header: run,seed,iteration,algorithm,perplexity,seconds
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace);
std::vector<TraceRecord> parse_trace_csv(std::istream& in);

// header: algorithm,mean_perplexity,std_perplexity
void write_summary_csv(std::ostream& out,
                       std::span<const AlgorithmSummary> summaries);

// Greedy one-to-one topic matching by cosine similarity between true and
// learned topic-word rows; returns the mean matched cosine.
double greedy_phi_recovery(std::span<const double> phi_true, int topics,
                           int vocab, const PointEstimates& est,
                           std::vector<double>* per_topic = nullptr);

}  // namespace alphalda
