#include "alphalda/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "alphalda/experiment.hpp"

namespace alphalda {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

kern::Backend parse_backend(const std::string& name) {
  if (name == "auto") return kern::Backend::kAuto;
  if (name == "scalar") return kern::Backend::kScalar;
  if (name == "avx2") return kern::Backend::kAvx2;
  throw std::invalid_argument("unknown kernel backend \"" + name +
                              "\" (expected auto, scalar or avx2)");
}

std::vector<AlgorithmKind> parse_algorithm_list(const std::string& text) {
  std::vector<AlgorithmKind> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "all") {
      for (AlgorithmKind kind : kAllAlgorithms) out.push_back(kind);
      continue;
    }
    const auto kind = parse_algorithm(item);
    if (!kind) {
      throw std::invalid_argument(
          "unknown algorithm \"" + item +
          "\" (expected gibbs, cvb, cvb0, cvb1s, cvb1d, tcvb0 or all)");
    }
    out.push_back(*kind);
  }
  // keep first occurrence of each
  std::vector<AlgorithmKind> unique;
  for (AlgorithmKind kind : out) {
    bool seen = false;
    for (AlgorithmKind u : unique) seen = seen || u == kind;
    if (!seen) unique.push_back(kind);
  }
  if (unique.empty()) throw std::invalid_argument("empty algorithm list");
  return unique;
}

SyntheticSpec parse_synthetic(const std::string& text) {
  SyntheticSpec spec;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("synthetic spec entries look like key=value");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      if (key == "T") spec.topics = std::stoi(value);
      else if (key == "D") spec.docs = std::stoi(value);
      else if (key == "V") spec.vocab = std::stoi(value);
      else if (key == "len") spec.doc_len = std::stoi(value);
      else if (key == "gamma") spec.gamma = std::stod(value);
      else if (key == "beta") spec.beta = std::stod(value);
      else
        throw std::invalid_argument(
            "unknown synthetic key \"" + key +
            "\" (expected T, D, V, len, gamma or beta)");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad synthetic value \"" + item + "\"");
    }
  }
  return spec;
}

std::vector<double> parse_gamma_list(const std::string& text, int topics) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad gamma value \"" + item + "\"");
    }
  }
  if (values.size() == 1) values.assign(topics, values[0]);
  if (values.size() != static_cast<std::size_t>(topics)) {
    throw std::invalid_argument(
        "gamma needs one value or one per topic (topics = " +
        std::to_string(topics) + ")");
  }
  return values;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

void RunSpec::validate() const {
  const bool has_files = !docword_path.empty() || !vocab_path.empty();
  if (has_files && (docword_path.empty() || vocab_path.empty())) {
    throw std::invalid_argument("--docword and --vocab go together");
  }
  if (has_files == synthetic.has_value()) {
    throw std::invalid_argument(
        "need exactly one corpus source: --docword/--vocab or --synthetic");
  }
  if (synthetic) {
    if (synthetic->topics < 1 || synthetic->docs < 1 || synthetic->vocab < 1 ||
        synthetic->doc_len < 1) {
      throw std::invalid_argument("synthetic dimensions must be >= 1");
    }
    if (!(synthetic->gamma > 0.0) || !(synthetic->beta > 0.0)) {
      throw std::invalid_argument("synthetic gamma and beta must be > 0");
    }
  }
  if (algorithms.empty()) throw std::invalid_argument("no algorithms given");
  if (topics < 1) throw std::invalid_argument("--topics must be >= 1");
  if (iterations < 1) throw std::invalid_argument("--iterations must be >= 1");
  if (!(beta > 0.0)) throw std::invalid_argument("--beta must be > 0");
  if (gamma.size() != static_cast<std::size_t>(topics)) {
    throw std::invalid_argument("gamma must have one entry per topic");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("gamma entries must be > 0");
  }
  if (!(holdout > 0.0 && holdout < 1.0)) {
    throw std::invalid_argument("--holdout must be in (0, 1)");
  }
  if (gamma_burnin < 0) {
    throw std::invalid_argument("--gamma-burnin must be >= 0");
  }
  if (runs < 1) throw std::invalid_argument("--runs must be >= 1");
  if (samples < 1) throw std::invalid_argument("--samples must be >= 1");
  if (out_dir.empty()) throw std::invalid_argument("--out must not be empty");
}

RunSpec parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Collapsed LDA inference toolkit"};
  app.set_version_flag("--version", std::string(kArtifactVersion));

  RunSpec spec;
  std::string algorithm_text = "cvb0";
  std::string synthetic_text;
  std::string gamma_text;
  std::string kernels_text = "auto";
  std::string timing_text = "wall";
  std::string manifest_path;
  std::string out_dir;

  app.add_option("--docword", spec.docword_path,
                 "UCI bag-of-words docword file");
  app.add_option("--vocab", spec.vocab_path, "vocabulary file, one term/line");
  app.add_option("--synthetic", synthetic_text,
                 "generate a corpus, e.g. T=10,D=200,V=500,len=100");
  app.add_option("--algorithm", algorithm_text,
                 "comma list of gibbs,cvb,cvb0,cvb1s,cvb1d,tcvb0 or all");
  app.add_option("--topics", spec.topics, "number of topics T");
  app.add_option("--iterations", spec.iterations, "sweeps per run");
  app.add_option("--beta", spec.beta, "symmetric topic-word prior");
  app.add_option("--gamma", gamma_text,
                 "document-topic prior: scalar or comma list (default 50/T)");
  app.add_option("--estimate-gamma", spec.estimate_gamma,
                 "update gamma by fixed point each sweep");
  app.add_option("--gamma-burnin", spec.gamma_burnin,
                 "sweeps before the first gamma update");
  app.add_option("--holdout", spec.holdout, "held-out token fraction");
  app.add_option("--seed", spec.seed, "base seed");
  app.add_option("--runs", spec.runs, "number of seeded runs");
  app.add_option("--samples", spec.samples, "S for cvb1s");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--kernels", kernels_text, "auto, scalar or avx2");
  app.add_option("--timing", timing_text,
                 "wall (measured seconds) or off (zeros, byte-reproducible)");
  app.add_option("--manifest", manifest_path,
                 "replay a manifest.json from a previous run");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::CallForVersion&) {
    throw HelpRequested{std::string(kArtifactVersion) + "\n"};
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  if (!manifest_path.empty()) {
    std::ifstream in(manifest_path);
    if (!in) {
      throw std::invalid_argument("cannot open manifest " + manifest_path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    RunSpec replay = spec_from_manifest_text(buffer.str());
    if (!out_dir.empty()) replay.out_dir = out_dir;
    replay.validate();
    return replay;
  }

  if (!synthetic_text.empty()) spec.synthetic = parse_synthetic(synthetic_text);
  spec.algorithms = parse_algorithm_list(algorithm_text);
  if (gamma_text.empty()) {
    if (spec.topics >= 1) spec.gamma = symmetric_gamma(spec.topics);
  } else {
    spec.gamma = parse_gamma_list(gamma_text, spec.topics);
  }
  spec.kernels = parse_backend(kernels_text);
  if (timing_text == "wall") {
    spec.wall_time = true;
  } else if (timing_text == "off") {
    spec.wall_time = false;
  } else {
    throw std::invalid_argument("--timing expects wall or off");
  }
  if (!out_dir.empty()) spec.out_dir = out_dir;
  spec.validate();
  return spec;
}

std::string manifest_json(const RunSpec& spec,
                          std::string_view resolved_backend) {
  json m;
  m["artifact"] = "alphalda";
  m["version"] = std::string(kArtifactVersion);
  json s;
  s["docword"] = spec.docword_path;
  s["vocab"] = spec.vocab_path;
  if (spec.synthetic) {
    s["synthetic"] = {{"T", spec.synthetic->topics},
                      {"D", spec.synthetic->docs},
                      {"V", spec.synthetic->vocab},
                      {"len", spec.synthetic->doc_len},
                      {"gamma", spec.synthetic->gamma},
                      {"beta", spec.synthetic->beta}};
  } else {
    s["synthetic"] = nullptr;
  }
  json algs = json::array();
  for (AlgorithmKind kind : spec.algorithms) {
    algs.push_back(std::string(algorithm_name(kind)));
  }
  s["algorithms"] = algs;
  s["topics"] = spec.topics;
  s["iterations"] = spec.iterations;
  s["beta"] = spec.beta;
  s["gamma"] = spec.gamma;
  s["estimate_gamma"] = spec.estimate_gamma;
  s["gamma_burnin"] = spec.gamma_burnin;
  s["holdout"] = spec.holdout;
  s["seed"] = spec.seed;
  s["runs"] = spec.runs;
  s["samples"] = spec.samples;
  s["out"] = spec.out_dir;
  s["timing"] = spec.wall_time ? "wall" : "off";
  // Rerunning a manifest pins the kernel backend that actually executed, so
  // the replay takes the same arithmetic path.
  s["kernels"] = std::string(resolved_backend);
  m["spec"] = s;
  json resolved;
  resolved["kernel_backend"] = std::string(resolved_backend);
  json seeds = json::array();
  for (int r = 0; r < spec.runs; ++r) {
    seeds.push_back(spec.seed + static_cast<uint64_t>(r));
  }
  resolved["run_seeds"] = seeds;
  m["resolved"] = resolved;
  return m.dump(2) + "\n";
}

RunSpec spec_from_manifest_text(const std::string& text) {
  json m;
  try {
    m = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad manifest: ") + e.what());
  }
  if (!m.contains("spec")) {
    throw std::invalid_argument("manifest has no spec object");
  }
  const json& s = m["spec"];
  RunSpec spec;
  try {
    spec.docword_path = s.value("docword", std::string());
    spec.vocab_path = s.value("vocab", std::string());
    if (s.contains("synthetic") && !s["synthetic"].is_null()) {
      const json& syn = s["synthetic"];
      SyntheticSpec synthetic;
      synthetic.topics = syn.at("T").get<int>();
      synthetic.docs = syn.at("D").get<int>();
      synthetic.vocab = syn.at("V").get<int>();
      synthetic.doc_len = syn.at("len").get<int>();
      synthetic.gamma = syn.at("gamma").get<double>();
      synthetic.beta = syn.at("beta").get<double>();
      spec.synthetic = synthetic;
    }
    spec.algorithms.clear();
    for (const json& name : s.at("algorithms")) {
      const auto kind = parse_algorithm(name.get<std::string>());
      if (!kind) throw std::invalid_argument("unknown algorithm in manifest");
      spec.algorithms.push_back(*kind);
    }
    spec.topics = s.at("topics").get<int>();
    spec.iterations = s.at("iterations").get<int>();
    spec.beta = s.at("beta").get<double>();
    spec.gamma = s.at("gamma").get<std::vector<double>>();
    spec.estimate_gamma = s.at("estimate_gamma").get<bool>();
    spec.gamma_burnin = s.value("gamma_burnin", 20);
    spec.holdout = s.at("holdout").get<double>();
    spec.seed = s.at("seed").get<uint64_t>();
    spec.runs = s.at("runs").get<int>();
    spec.samples = s.at("samples").get<int>();
    spec.out_dir = s.at("out").get<std::string>();
    spec.wall_time = s.value("timing", "wall") == std::string("wall");
    spec.kernels = parse_backend(s.value("kernels", "auto"));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad manifest: ") + e.what());
  }
  return spec;
}

int run(const RunSpec& spec) {
  spec.validate();
  kern::select_backend(spec.kernels);
  const std::string resolved(kern::active().name);

  Corpus corpus;
  std::vector<double> phi_true;
  if (spec.synthetic) {
    const SyntheticSpec& syn = *spec.synthetic;
    const std::vector<double> gen_gamma(syn.topics, syn.gamma);
    SyntheticCorpus generated = synthesize_lda_corpus(
        syn.topics, syn.docs, syn.vocab, syn.doc_len, gen_gamma, syn.beta,
        spec.seed ^ 0xa0761d6478bd642fULL);
    corpus = std::move(generated.corpus);
    phi_true = std::move(generated.phi_true);
    std::cout << "synthesized corpus: D=" << corpus.num_documents()
              << " V=" << corpus.vocab_size() << " n=" << corpus.total_tokens
              << "\n";
  } else {
    std::ifstream docword(spec.docword_path);
    if (!docword) {
      throw std::runtime_error("cannot open " + spec.docword_path);
    }
    std::ifstream vocab(spec.vocab_path);
    if (!vocab) throw std::runtime_error("cannot open " + spec.vocab_path);
    corpus = load_uci_bow(docword, vocab);
    std::cout << "loaded corpus: D=" << corpus.num_documents()
              << " V=" << corpus.vocab_size() << " n=" << corpus.total_tokens
              << "\n";
  }

  InferenceConfig base;
  base.topics = spec.topics;
  base.iterations = spec.iterations;
  base.seed = spec.seed;
  base.gamma = spec.gamma;
  base.beta = spec.beta;
  base.update_gamma = spec.estimate_gamma;
  base.gamma_burnin = spec.gamma_burnin;
  base.sample_count = spec.samples;

  ExperimentResult result = averaged_experiment(
      base, spec.algorithms, corpus, spec.holdout, spec.runs, spec.wall_time);

  fs::create_directories(spec.out_dir);
  const fs::path out_dir(spec.out_dir);

  for (AlgorithmKind kind : spec.algorithms) {
    std::vector<TraceRecord> filtered;
    for (const TraceRecord& rec : result.trace) {
      if (rec.algorithm == kind) filtered.push_back(rec);
    }
    std::ostringstream csv;
    write_trace_csv(csv, filtered);
    atomic_write(out_dir / ("trace_" + std::string(algorithm_name(kind)) +
                            ".csv"),
                 csv.str());
  }
  {
    std::ostringstream csv;
    write_summary_csv(csv, result.summaries);
    atomic_write(out_dir / "summary.csv", csv.str());
  }
  if (spec.synthetic) {
    std::ostringstream csv;
    csv << "algorithm,run,recovery\n";
    for (const RunResult& rr : result.runs) {
      const double score = greedy_phi_recovery(
          phi_true, spec.synthetic->topics, spec.synthetic->vocab,
          rr.final_estimates);
      csv << algorithm_name(rr.algorithm) << ',' << rr.run << ','
          << format_double(score) << '\n';
    }
    atomic_write(out_dir / "recovery.csv", csv.str());
  }
  atomic_write(out_dir / "manifest.json", manifest_json(spec, resolved));

  std::cout << "kernels: " << resolved << "\n";
  for (const AlgorithmSummary& s : result.summaries) {
    std::cout << algorithm_name(s.algorithm)
              << ": mean final perplexity = " << s.mean_perplexity
              << " (std " << s.std_perplexity << ")\n";
  }
  std::cout << "wrote " << spec.out_dir << "\n";
  return 0;
}

}  // namespace alphalda
