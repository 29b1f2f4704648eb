#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alphalda/inference.hpp"
#include "alphalda/kernels.hpp"

namespace alphalda {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

struct SyntheticSpec {
  int topics = 10;
  int docs = 200;
  int vocab = 500;
  int doc_len = 100;
  double gamma = 0.5;  // generator-side Dirichlet parameters
  double beta = 0.05;
};

struct RunSpec {
  std::string docword_path;
  std::string vocab_path;
  std::optional<SyntheticSpec> synthetic;

  std::vector<AlgorithmKind> algorithms = {AlgorithmKind::kCvb0};
  int topics = 10;
  int iterations = 100;
  double beta = 0.01;
  std::vector<double> gamma;  // length topics; 50/topics when not given
  bool estimate_gamma = true;
  int gamma_burnin = 20;
  double holdout = 0.2;
  uint64_t seed = 1;
  int runs = 5;
  int samples = 50;
  std::string out_dir = "out";
  kern::Backend kernels = kern::Backend::kAuto;
  bool wall_time = true;

  void validate() const;
};

// Thrown by parse_config on --help / --version so main can print and exit 0.
struct HelpRequested {
  std::string text;
};

// Parses flags (and an optional --manifest replay file) into a fully
// validated RunSpec. Throws std::invalid_argument with a one-line message on
// any bad input; parsing is the single validation gate for downstream code.
RunSpec parse_config(const std::vector<std::string>& args);

// Executes the spec: trains every (algorithm x run), then writes per-
// algorithm trace CSVs, summary.csv, manifest.json and (for synthetic
// corpora) recovery.csv into the output directory. Files are written
// atomically. Returns the process exit status.
int run(const RunSpec& spec);

std::string manifest_json(const RunSpec& spec,
                          std::string_view resolved_backend);
RunSpec spec_from_manifest_text(const std::string& text);

}  // namespace alphalda
