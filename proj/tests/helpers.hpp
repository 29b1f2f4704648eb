#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "alphalda/corpus.hpp"
#include "alphalda/enumeration.hpp"
#include "alphalda/stats.hpp"

namespace testutil {

inline std::vector<double> random_measure(std::size_t n, std::mt19937_64& rng,
                                          double lo = 0.05, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  std::vector<double> w(n);
  for (double& x : w) x = unif(rng);
  return w;
}

inline std::vector<double> random_distribution(std::size_t n,
                                               std::mt19937_64& rng) {
  std::vector<double> p = random_measure(n, rng);
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;
  return p;
}

// Corpus from explicit token lists; vocabulary ids must be < vocab.
inline alphalda::Corpus make_corpus(
    const std::vector<std::vector<int32_t>>& docs, int vocab) {
  alphalda::Corpus corpus;
  for (int v = 0; v < vocab; ++v) {
    corpus.vocabulary.terms.push_back("w" + std::to_string(v));
  }
  for (const auto& tokens : docs) {
    alphalda::Document doc;
    std::vector<int32_t> counts(vocab, 0);
    for (int32_t w : tokens) {
      if (counts[w] == 0) doc.type_counts.emplace_back(w, 0);
      ++counts[w];
      doc.tokens.push_back(w);
    }
    for (auto& [word, count] : doc.type_counts) count = counts[word];
    corpus.documents.push_back(std::move(doc));
    corpus.total_tokens += tokens.size();
  }
  return corpus;
}

inline alphalda::TinyCollapsedModel make_tiny_model(
    const std::vector<std::vector<int32_t>>& docs, int vocab, int topics,
    std::vector<double> gamma, double beta) {
  alphalda::TinyCollapsedModel model;
  model.corpus = make_corpus(docs, vocab);
  model.hyper.gamma = std::move(gamma);
  model.hyper.beta = beta;
  model.hyper.vocab_size = vocab;
  model.view = alphalda::TrainView::covering(model.corpus);
  model.q.T = topics;
  model.q.q.assign(model.view.total_tokens() * topics, 1.0 / topics);
  return model;
}

inline void set_q(alphalda::TinyCollapsedModel& model, int64_t flat,
                  const std::vector<double>& row) {
  auto dst = model.q.at(flat);
  std::copy(row.begin(), row.end(), dst.begin());
}

inline alphalda::TinyCollapsedModel random_tiny_model(int max_tokens,
                                                      std::mt19937_64& rng) {
  std::uniform_int_distribution<int> topics_pick(2, 3);
  std::uniform_int_distribution<int> docs_pick(1, 3);
  std::uniform_int_distribution<int> vocab_pick(2, 4);
  const int topics = topics_pick(rng);
  const int n_docs = docs_pick(rng);
  const int vocab = vocab_pick(rng);
  std::uniform_int_distribution<int> word_pick(0, vocab - 1);
  std::uniform_int_distribution<int> len_pick(1, std::max(1, max_tokens / n_docs));

  std::vector<std::vector<int32_t>> docs(n_docs);
  int total = 0;
  for (auto& doc : docs) {
    const int len = len_pick(rng);
    for (int i = 0; i < len && total < max_tokens; ++i, ++total) {
      doc.push_back(word_pick(rng));
    }
    if (doc.empty()) {
      doc.push_back(word_pick(rng));
      ++total;
    }
  }
  std::uniform_real_distribution<double> gamma_pick(0.1, 1.5);
  std::uniform_real_distribution<double> beta_pick(0.005, 0.2);
  std::vector<double> gamma(topics);
  for (double& g : gamma) g = gamma_pick(rng);

  alphalda::TinyCollapsedModel model =
      make_tiny_model(docs, vocab, topics, gamma, beta_pick(rng));
  for (int64_t i = 0; i < model.view.total_tokens(); ++i) {
    set_q(model, i, random_distribution(topics, rng));
  }
  return model;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("alphalda_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
