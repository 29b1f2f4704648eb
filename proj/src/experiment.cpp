#include "alphalda/experiment.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace alphalda {

ExperimentResult averaged_experiment(const InferenceConfig& base,
                                     std::span<const AlgorithmKind> algorithms,
                                     const Corpus& corpus, double holdout_ratio,
                                     int n_runs, bool record_wall_time) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  if (algorithms.empty()) {
    throw std::invalid_argument("need at least one algorithm");
  }

  ExperimentResult result;
  std::vector<std::vector<double>> finals(algorithms.size());
  for (int r = 0; r < n_runs; ++r) {
    const uint64_t seed = base.seed + static_cast<uint64_t>(r);
    const HoldoutSplit split = split_holdout(corpus, holdout_ratio, seed);
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      InferenceConfig config = base;
      config.algorithm = algorithms[a];
      config.seed = seed;
      RunOutput output =
          run_inference(config, corpus, split, record_wall_time);
      for (const IterationRecord& rec : output.trace) {
        result.trace.push_back({r, seed, rec.iteration, algorithms[a],
                                rec.perplexity, rec.seconds});
      }
      finals[a].push_back(output.trace.back().perplexity);
      result.runs.push_back({algorithms[a], r, seed, std::move(output.trace),
                             std::move(output.final_estimates)});
    }
  }

  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    AlgorithmSummary summary;
    summary.algorithm = algorithms[a];
    double mean = 0.0;
    for (double p : finals[a]) mean += p;
    mean /= finals[a].size();
    double var = 0.0;
    if (finals[a].size() > 1) {
      for (double p : finals[a]) var += (p - mean) * (p - mean);
      var /= (finals[a].size() - 1);
    }
    summary.mean_perplexity = mean;
    summary.std_perplexity = std::sqrt(var);
    result.summaries.push_back(summary);
  }
  return result;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> trace) {
  out << "run,seed,iteration,algorithm,perplexity,seconds\n";
  for (const TraceRecord& rec : trace) {
    out << rec.run << ',' << rec.seed << ',' << rec.iteration << ','
        << algorithm_name(rec.algorithm) << ',' << format_double(rec.perplexity)
        << ',' << format_double(rec.seconds) << '\n';
  }
}

namespace {

template <class T>
T parse_field(const std::string& field, int line) {
  T value{};
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("trace csv line " + std::to_string(line) +
                             ": bad numeric field \"" + field + "\"");
  }
  return value;
}

}  // namespace

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "run,seed,iteration,algorithm,perplexity,seconds") {
    throw std::runtime_error("trace csv: missing or wrong header");
  }
  std::vector<TraceRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw std::runtime_error("trace csv line " + std::to_string(line_no) +
                               ": expected 6 fields");
    }
    TraceRecord rec;
    rec.run = parse_field<int>(fields[0], line_no);
    rec.seed = parse_field<uint64_t>(fields[1], line_no);
    rec.iteration = parse_field<int>(fields[2], line_no);
    const auto kind = parse_algorithm(fields[3]);
    if (!kind) {
      throw std::runtime_error("trace csv line " + std::to_string(line_no) +
                               ": unknown algorithm \"" + fields[3] + "\"");
    }
    rec.algorithm = *kind;
    rec.perplexity = parse_field<double>(fields[4], line_no);
    rec.seconds = parse_field<double>(fields[5], line_no);
    records.push_back(rec);
  }
  return records;
}

void write_summary_csv(std::ostream& out,
                       std::span<const AlgorithmSummary> summaries) {
  out << "algorithm,mean_perplexity,std_perplexity\n";
  for (const AlgorithmSummary& s : summaries) {
    out << algorithm_name(s.algorithm) << ','
        << format_double(s.mean_perplexity) << ','
        << format_double(s.std_perplexity) << '\n';
  }
}

double greedy_phi_recovery(std::span<const double> phi_true, int topics,
                           int vocab, const PointEstimates& est,
                           std::vector<double>* per_topic) {
  if (est.T != topics || est.V != vocab) {
    throw std::invalid_argument("estimates do not match the true phi shape");
  }
  if (phi_true.size() != static_cast<std::size_t>(topics) * vocab) {
    throw std::invalid_argument("phi_true has the wrong shape");
  }

  // Cosine similarity matrix between true rows and learned rows.
  std::vector<double> cosine(static_cast<std::size_t>(topics) * topics, 0.0);
  std::vector<double> true_norm(topics, 0.0), est_norm(topics, 0.0);
  for (int t = 0; t < topics; ++t) {
    for (int v = 0; v < vocab; ++v) {
      const double x = phi_true[static_cast<std::size_t>(t) * vocab + v];
      true_norm[t] += x * x;
      const double y = est.phi_at(t, v);
      est_norm[t] += y * y;
    }
  }
  for (int a = 0; a < topics; ++a) {
    for (int b = 0; b < topics; ++b) {
      double dot = 0.0;
      for (int v = 0; v < vocab; ++v) {
        dot += phi_true[static_cast<std::size_t>(a) * vocab + v] *
               est.phi_at(b, v);
      }
      cosine[static_cast<std::size_t>(a) * topics + b] =
          dot / std::sqrt(true_norm[a] * est_norm[b]);
    }
  }

  std::vector<bool> used_true(topics, false), used_est(topics, false);
  std::vector<double> matched(topics, 0.0);
  for (int round = 0; round < topics; ++round) {
    int best_a = -1, best_b = -1;
    double best = -2.0;
    for (int a = 0; a < topics; ++a) {
      if (used_true[a]) continue;
      for (int b = 0; b < topics; ++b) {
        if (used_est[b]) continue;
        const double c = cosine[static_cast<std::size_t>(a) * topics + b];
        if (c > best) {
          best = c;
          best_a = a;
          best_b = b;
        }
      }
    }
    used_true[best_a] = true;
    used_est[best_b] = true;
    matched[best_a] = best;
  }
  double mean = 0.0;
  for (double c : matched) mean += c;
  mean /= topics;
  if (per_topic) *per_topic = std::move(matched);
  return mean;
}

}  // namespace alphalda
