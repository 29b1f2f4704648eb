#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "alphalda/corpus.hpp"

namespace alphalda {

struct Hyperparams {
  std::vector<double> gamma;  // length T, all > 0 (asymmetric)
  double beta = 0.01;         // symmetric, > 0
  int vocab_size = 0;

  int topics() const { return static_cast<int>(gamma.size()); }
  double gamma_sum() const;
  double vbeta() const { return beta * vocab_size; }
  void validate() const;
};

// Flattened view of the tokens an inference run covers (the training side of
// a holdout split, or every token). Immutable once built.
struct TrainView {
  int D = 0, V = 0;
  std::vector<int64_t> doc_offset;  // length D + 1
  std::vector<int32_t> position;    // token index within its document
  std::vector<int32_t> word;        // vocabulary id

  int64_t total_tokens() const { return doc_offset.empty() ? 0 : doc_offset.back(); }
  int64_t doc_begin(int d) const { return doc_offset[d]; }
  int64_t doc_end(int d) const { return doc_offset[d + 1]; }
  int32_t doc_tokens(int d) const {
    return static_cast<int32_t>(doc_offset[d + 1] - doc_offset[d]);
  }

  static TrainView covering(const Corpus& corpus);
  static TrainView training(const Corpus& corpus, const HoldoutSplit& split);
};

// Covered word types per document in first-appearance order, with their
// covered multiplicities n_dv.
struct TypeView {
  int D = 0, V = 0;
  std::vector<int64_t> doc_offset;  // length D + 1
  std::vector<int32_t> word;
  std::vector<int32_t> count;  // n_dv over covered tokens

  int64_t total_types() const { return doc_offset.empty() ? 0 : doc_offset.back(); }
  int64_t covered_tokens() const;
  int64_t doc_begin(int d) const { return doc_offset[d]; }
  int64_t doc_end(int d) const { return doc_offset[d + 1]; }

  static TypeView covering(const Corpus& corpus);
  static TypeView training(const Corpus& corpus, const HoldoutSplit& split);
};

// One probability vector over T topics per covered token, stored flat in
// view order. Rows sum to 1.
struct TokenPosterior {
  int T = 0;
  std::vector<double> q;

  std::span<double> at(int64_t flat) {
    return {q.data() + flat * T, static_cast<std::size_t>(T)};
  }
  std::span<const double> at(int64_t flat) const {
    return {q.data() + flat * T, static_cast<std::size_t>(T)};
  }

  // Each row drawn from a symmetric Dirichlet(1, ..., 1).
  static TokenPosterior random_init(const TrainView& view, int topics,
                                    std::mt19937_64& rng);
};

// One probability vector per covered (document, type) pair, view order.
struct TypePosterior {
  int T = 0;
  std::vector<double> q;

  std::span<double> at(int64_t flat) {
    return {q.data() + flat * T, static_cast<std::size_t>(T)};
  }
  std::span<const double> at(int64_t flat) const {
    return {q.data() + flat * T, static_cast<std::size_t>(T)};
  }

  static TypePosterior random_init(const TypeView& view, int topics,
                                   std::mt19937_64& rng);
};

// Hard topic assignments plus their integer count tallies, for the
// collapsed Gibbs sampler. n_tv is stored word-major (row per v).
struct HardAssignment {
  int T = 0;
  std::vector<int32_t> z;     // per covered token, view order
  std::vector<int32_t> n_dt;  // D x T
  std::vector<int32_t> n_tv;  // V x T, word-major
  std::vector<int64_t> n_t;   // length T

  static HardAssignment random_init(const TrainView& view, int topics,
                                    std::mt19937_64& rng);
  // Throws if the count tables disagree with the tallies of z.
  void check_tallies(const TrainView& view) const;
};

// Scratch for one exclude -> update -> include cycle; length-T buffers.
struct Excluded {
  std::vector<double> e_dt, e_tv, e_t;
  std::vector<double> var_dt, var_tv, var_t;
  bool with_var = false;

  void resize(int topics, bool variances);
};

// The shared sufficient statistics: expected counts (and optional
// variances) that every variational algorithm reads and writes.
// E_tv is kept dense and word-major so each per-token update touches three
// contiguous length-T rows.
class MomentTable {
 public:
  MomentTable() = default;

  static MomentTable from_tokens(const TrainView& view,
                                 const TokenPosterior& posterior,
                                 bool with_variances);
  static MomentTable from_types(const TypeView& view,
                                const TypePosterior& posterior,
                                bool with_variances);

  int D() const { return d_; }
  int V() const { return v_; }
  int T() const { return t_; }
  bool with_variances() const { return with_var_; }
  int64_t covered_tokens() const { return covered_; }
  int32_t doc_tokens(int d) const { return doc_tokens_[d]; }

  std::span<const double> doc_row(int d) const {
    return {e_dt_.data() + static_cast<std::size_t>(d) * t_,
            static_cast<std::size_t>(t_)};
  }
  std::span<const double> word_row(int v) const {
    return {e_tv_.data() + static_cast<std::size_t>(v) * t_,
            static_cast<std::size_t>(t_)};
  }
  std::span<const double> topic_totals() const { return e_t_; }
  std::span<const double> doc_var_row(int d) const {
    return {var_dt_.data() + static_cast<std::size_t>(d) * t_,
            static_cast<std::size_t>(t_)};
  }
  std::span<const double> word_var_row(int v) const {
    return {var_tv_.data() + static_cast<std::size_t>(v) * t_,
            static_cast<std::size_t>(t_)};
  }
  std::span<const double> topic_var_totals() const { return var_t_; }

  // Writes E - q_di (and Var - q_di(1 - q_di)) for the three tables into
  // `out` without touching the table; the exclusion stays outstanding until
  // the matching include. Values in (-1e-9, 0) clamp to 0; anything more
  // negative throws (stats/posterior desynchronization).
  void exclude_token(int d, int32_t pos, int32_t v,
                     std::span<const double> q_old, Excluded& out);
  // Commits the outstanding exclusion and adds q_new: net effect
  // E += q_new - q_old. Throws without a matching exclude.
  void include_token(int d, int32_t pos, int32_t v,
                     std::span<const double> q_old,
                     std::span<const double> q_new);

  // Type-level variants scaled by multiplicity: E - n_dv * q_dv.
  void exclude_type(int d, int32_t v, std::span<const double> q_old,
                    int32_t multiplicity, Excluded& out);
  void include_type(int d, int32_t v, std::span<const double> q_old,
                    std::span<const double> q_new, int32_t multiplicity);

  double max_abs_diff(const MomentTable& other) const;

 private:
  void subtract_into(int d, int32_t v, std::span<const double> q_old,
                     double multiplicity, Excluded& out) const;
  void apply_delta(int d, int32_t v, std::span<const double> q_old,
                   std::span<const double> q_new, double multiplicity);

  int d_ = 0, v_ = 0, t_ = 0;
  bool with_var_ = false;
  int64_t covered_ = 0;
  std::vector<int32_t> doc_tokens_;
  std::vector<double> e_dt_;   // D x T
  std::vector<double> e_tv_;   // V x T, word-major
  std::vector<double> e_t_;    // T
  std::vector<double> var_dt_, var_tv_, var_t_;

  bool pending_ = false;
  int pending_d_ = -1;
  int64_t pending_key_ = -1;
  std::vector<double> scratch_delta_, scratch_var_;

  friend struct MomentTableIo;
};

struct ConservationReport {
  double max_doc_violation = 0.0;    // max_d |sum_t E_dt[d,.] - n_d|
  double max_topic_violation = 0.0;  // max_t |sum_v E_tv[.,t] - E_t[t]|
  double total_violation = 0.0;      // |sum_t E_t - n|

  double max_violation() const;
  std::string to_string() const;
};

ConservationReport verify_conservation(const MomentTable& m);

}  // namespace alphalda
