#include "alphalda/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace alphalda {

namespace {

[[noreturn]] void fail_at(int line, const std::string& what) {
  throw std::runtime_error("docword line " + std::to_string(line) + ": " +
                           what);
}

int64_t read_header_int(std::istream& in, int line, const char* name) {
  std::string text;
  if (!std::getline(in, text)) fail_at(line, std::string("missing ") + name);
  std::istringstream ss(text);
  int64_t value = 0;
  if (!(ss >> value)) fail_at(line, std::string("malformed ") + name);
  std::string rest;
  if (ss >> rest) fail_at(line, std::string("trailing content after ") + name);
  return value;
}

void append_tokens(Document& doc, int32_t word, int32_t count) {
  doc.tokens.insert(doc.tokens.end(), count, word);
  for (auto& tc : doc.type_counts) {
    if (tc.first == word) {
      tc.second += count;
      return;
    }
  }
  doc.type_counts.emplace_back(word, count);
}

std::vector<double> dirichlet_row(std::span<const double> alpha,
                                  std::mt19937_64& rng) {
  std::vector<double> row(alpha.size());
  double total = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    std::gamma_distribution<double> g(alpha[i], 1.0);
    row[i] = g(rng);
    total += row[i];
  }
  for (double& r : row) r /= total;
  return row;
}

Vocabulary numbered_vocabulary(int vocab) {
  Vocabulary v;
  v.terms.reserve(vocab);
  for (int i = 0; i < vocab; ++i) v.terms.push_back("w" + std::to_string(i));
  return v;
}

}  // namespace

Corpus load_uci_bow(std::istream& docword, std::istream& vocab) {
  const int64_t n_docs = read_header_int(docword, 1, "document count D");
  const int64_t n_words = read_header_int(docword, 2, "vocabulary size W");
  const int64_t nnz = read_header_int(docword, 3, "entry count NNZ");
  if (n_docs < 1) fail_at(1, "document count must be >= 1");
  if (n_words < 1) fail_at(2, "vocabulary size must be >= 1");
  if (nnz < 0) fail_at(3, "entry count must be >= 0");

  Corpus corpus;
  corpus.documents.resize(n_docs);

  for (int64_t e = 0; e < nnz; ++e) {
    const int line = static_cast<int>(4 + e);
    int64_t doc_id = 0, word_id = 0, count = 0;
    if (!(docword >> doc_id >> word_id >> count)) {
      fail_at(line, "expected \"docID wordID count\"");
    }
    if (doc_id < 1 || doc_id > n_docs) fail_at(line, "doc id out of range");
    if (word_id < 1 || word_id > n_words) fail_at(line, "word id out of range");
    if (count <= 0) fail_at(line, "count must be positive");
    append_tokens(corpus.documents[doc_id - 1],
                  static_cast<int32_t>(word_id - 1),
                  static_cast<int32_t>(count));
    corpus.total_tokens += count;
  }

  corpus.vocabulary.terms.reserve(n_words);
  std::string term;
  while (std::getline(vocab, term)) {
    if (!term.empty() && term.back() == '\r') term.pop_back();
    corpus.vocabulary.terms.push_back(term);
  }
  if (corpus.vocab_size() != n_words) {
    throw std::runtime_error(
        "vocab file has " + std::to_string(corpus.vocab_size()) +
        " lines, docword header says W = " + std::to_string(n_words));
  }
  return corpus;
}

void save_uci_bow(const Corpus& corpus, std::ostream& docword,
                  std::ostream& vocab) {
  int64_t nnz = 0;
  for (const Document& doc : corpus.documents) nnz += doc.type_counts.size();
  docword << corpus.num_documents() << "\n"
          << corpus.vocab_size() << "\n"
          << nnz << "\n";
  for (int d = 0; d < corpus.num_documents(); ++d) {
    for (const auto& [word, count] : corpus.documents[d].type_counts) {
      docword << (d + 1) << " " << (word + 1) << " " << count << "\n";
    }
  }
  for (const std::string& term : corpus.vocabulary.terms) vocab << term << "\n";
}

HoldoutSplit split_holdout(const Corpus& corpus, double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("holdout ratio must be in (0, 1)");
  }
  HoldoutSplit split;
  split.ratio = ratio;
  split.seed = seed;
  split.train_indices.resize(corpus.num_documents());
  split.test_indices.resize(corpus.num_documents());

  std::mt19937_64 rng(seed);
  std::vector<int32_t> order;
  for (int d = 0; d < corpus.num_documents(); ++d) {
    const int32_t n_d = corpus.documents[d].length();
    int32_t n_test =
        static_cast<int32_t>(std::floor(ratio * n_d + 0.5));
    if (n_d >= 2) {
      n_test = std::min(n_test, n_d - 1);  // keep at least one train token
    } else {
      n_test = 0;
    }
    order.resize(n_d);
    for (int32_t i = 0; i < n_d; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    auto& test = split.test_indices[d];
    auto& train = split.train_indices[d];
    test.assign(order.begin(), order.begin() + n_test);
    train.assign(order.begin() + n_test, order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    split.test_total += test.size();
    split.train_total += train.size();
  }
  return split;
}

HoldoutSplit all_train_split(const Corpus& corpus) {
  HoldoutSplit split;
  split.train_indices.resize(corpus.num_documents());
  split.test_indices.resize(corpus.num_documents());
  for (int d = 0; d < corpus.num_documents(); ++d) {
    auto& train = split.train_indices[d];
    train.resize(corpus.documents[d].length());
    for (int32_t i = 0; i < corpus.documents[d].length(); ++i) train[i] = i;
    split.train_total += train.size();
  }
  return split;
}

SyntheticCorpus synthesize_from_params(std::span<const double> theta, int docs,
                                       std::span<const double> phi, int topics,
                                       int vocab, int doc_len, uint64_t seed) {
  if (docs < 1 || topics < 1 || vocab < 1 || doc_len < 1) {
    throw std::invalid_argument("synthetic corpus dimensions must be >= 1");
  }
  if (theta.size() != static_cast<std::size_t>(docs) * topics ||
      phi.size() != static_cast<std::size_t>(topics) * vocab) {
    throw std::invalid_argument("theta/phi shapes disagree with dimensions");
  }

  SyntheticCorpus out;
  out.topics = topics;
  out.theta_true.assign(theta.begin(), theta.end());
  out.phi_true.assign(phi.begin(), phi.end());
  out.corpus.vocabulary = numbered_vocabulary(vocab);
  out.corpus.documents.resize(docs);

  std::mt19937_64 rng(seed);
  std::vector<std::discrete_distribution<int32_t>> word_dist;
  word_dist.reserve(topics);
  for (int t = 0; t < topics; ++t) {
    word_dist.emplace_back(phi.begin() + static_cast<std::size_t>(t) * vocab,
                           phi.begin() + static_cast<std::size_t>(t + 1) * vocab);
  }

  std::vector<int32_t> doc_type_count(vocab, 0);
  for (int d = 0; d < docs; ++d) {
    std::discrete_distribution<int> topic_dist(
        theta.begin() + static_cast<std::size_t>(d) * topics,
        theta.begin() + static_cast<std::size_t>(d + 1) * topics);
    Document& doc = out.corpus.documents[d];
    doc.tokens.reserve(doc_len);
    std::fill(doc_type_count.begin(), doc_type_count.end(), 0);
    for (int i = 0; i < doc_len; ++i) {
      const int t = topic_dist(rng);
      const int32_t w = word_dist[t](rng);
      if (doc_type_count[w] == 0) doc.type_counts.emplace_back(w, 0);
      ++doc_type_count[w];
      doc.tokens.push_back(w);
    }
    for (auto& [word, count] : doc.type_counts) count = doc_type_count[word];
    out.corpus.total_tokens += doc_len;
  }
  return out;
}

SyntheticCorpus synthesize_lda_corpus(int topics, int docs, int vocab,
                                      int doc_len,
                                      std::span<const double> gamma,
                                      double beta, uint64_t seed) {
  if (topics < 1 || docs < 1 || vocab < 1 || doc_len < 1) {
    throw std::invalid_argument("synthetic corpus dimensions must be >= 1");
  }
  if (gamma.size() != static_cast<std::size_t>(topics)) {
    throw std::invalid_argument("gamma must have one entry per topic");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("gamma entries must be > 0");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");

  std::mt19937_64 rng(seed);
  std::vector<double> theta(static_cast<std::size_t>(docs) * topics);
  for (int d = 0; d < docs; ++d) {
    const std::vector<double> row = dirichlet_row(gamma, rng);
    std::copy(row.begin(), row.end(),
              theta.begin() + static_cast<std::size_t>(d) * topics);
  }
  const std::vector<double> beta_vec(vocab, beta);
  std::vector<double> phi(static_cast<std::size_t>(topics) * vocab);
  for (int t = 0; t < topics; ++t) {
    const std::vector<double> row = dirichlet_row(beta_vec, rng);
    std::copy(row.begin(), row.end(),
              phi.begin() + static_cast<std::size_t>(t) * vocab);
  }
  return synthesize_from_params(theta, docs, phi, topics, vocab, doc_len,
                                rng());
}

}  // namespace alphalda
