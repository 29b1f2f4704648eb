#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace alphalda {

struct Vocabulary {
  std::vector<std::string> terms;  // ids are 0..V-1, stable once loaded

  int size() const { return static_cast<int>(terms.size()); }
};

struct Document {
  std::vector<int32_t> tokens;  // vocabulary ids, length n_d
  // (v, n_dv) in first-appearance order of v within the token sequence
  std::vector<std::pair<int32_t, int32_t>> type_counts;

  int32_t length() const { return static_cast<int32_t>(tokens.size()); }
};

struct Corpus {
  std::vector<Document> documents;
  Vocabulary vocabulary;
  int64_t total_tokens = 0;

  int num_documents() const { return static_cast<int>(documents.size()); }
  int vocab_size() const { return vocabulary.size(); }
};

// Per-document partition of token positions into train and test.
struct HoldoutSplit {
  std::vector<std::vector<int32_t>> train_indices;  // sorted ascending
  std::vector<std::vector<int32_t>> test_indices;   // sorted ascending
  double ratio = 0.0;
  uint64_t seed = 0;
  int64_t train_total = 0;
  int64_t test_total = 0;
};

// UCI bag-of-words reader. The docword stream starts with three integer
// header lines D, W, NNZ followed by NNZ "docID wordID count" triples
// (1-based ids); the vocab stream has W lines, one term each. Token
// sequences materialize each entry as `count` repeated tokens in file
// order. Malformed input throws std::runtime_error naming the line.
Corpus load_uci_bow(std::istream& docword, std::istream& vocab);
void save_uci_bow(const Corpus& corpus, std::ostream& docword,
                  std::ostream& vocab);

// Deterministic per-document holdout: |test| = round-half-up(ratio * n_d),
// clamped so |train| >= 1 when n_d >= 2; single-token documents keep their
// token in train. Pure function of (corpus, ratio, seed).
HoldoutSplit split_holdout(const Corpus& corpus, double ratio, uint64_t seed);

// Degenerate split with every token in train (test empty); ratio = 0.
HoldoutSplit all_train_split(const Corpus& corpus);

struct SyntheticCorpus {
  Corpus corpus;
  int topics = 0;
  std::vector<double> theta_true;  // D x T, rows sum to 1
  std::vector<double> phi_true;    // T x V, rows sum to 1
};

// theta_d ~ Dir(gamma), phi_t ~ Dir(beta,...,beta), then doc_len tokens per
// document with z ~ Multi(theta_d), w ~ Multi(phi_z).
SyntheticCorpus synthesize_lda_corpus(int topics, int docs, int vocab,
                                      int doc_len,
                                      std::span<const double> gamma,
                                      double beta, uint64_t seed);

// Sampling half of the generator, reusable with externally built
// theta (D x T) and phi (T x V).
SyntheticCorpus synthesize_from_params(std::span<const double> theta, int docs,
                                       std::span<const double> phi, int topics,
                                       int vocab, int doc_len, uint64_t seed);

}  // namespace alphalda
