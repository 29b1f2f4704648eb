#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "alphalda/corpus.hpp"
#include "alphalda/evaluation.hpp"
#include "alphalda/stats.hpp"

namespace alphalda {

enum class AlgorithmKind { kGibbs, kCvb, kCvb0, kCvb1s, kCvb1d, kTcvb0 };

inline constexpr std::array<AlgorithmKind, 6> kAllAlgorithms = {
    AlgorithmKind::kGibbs,  AlgorithmKind::kCvb,   AlgorithmKind::kCvb0,
    AlgorithmKind::kCvb1s, AlgorithmKind::kCvb1d, AlgorithmKind::kTcvb0,
};

std::string_view algorithm_name(AlgorithmKind kind);
std::optional<AlgorithmKind> parse_algorithm(std::string_view name);

struct InferenceConfig {
  int topics = 10;
  int iterations = 100;
  uint64_t seed = 1;
  AlgorithmKind algorithm = AlgorithmKind::kCvb0;
  std::vector<double> gamma;  // initial, length topics
  double beta = 0.01;
  bool update_gamma = true;
  // Sweeps before the first gamma fixed-point update. Fitting gamma to the
  // still-uniform early posteriors inflates it and locks the variational
  // algorithms at their initialization, so the fixed point waits until the
  // statistics carry structure.
  int gamma_burnin = 20;
  int rebuild_period = 10;  // full moment rebuild every R sweeps
  int sample_count = 50;    // S for the sampled c factor

  void validate() const;
};

// Conventional symmetric initializer 50/T for the document-topic prior.
std::vector<double> symmetric_gamma(int topics);

// ---- single-site update primitives ----------------------------------------

// p(t) proportional to (n_tv + beta)/(n_t + V beta) * (n_dt + gamma_t), over
// count tables that already exclude the token being updated. Output sums to 1.
void gibbs_conditional(const HardAssignment& counts, int d, int32_t v,
                       const Hyperparams& h, std::span<double> out);

// One full pass: every token is removed from the counts, resampled from its
// conditional, and reinserted. The integer tallies stay exact.
void gibbs_sweep(HardAssignment& state, const TrainView& view,
                 const Hyperparams& h, std::mt19937_64& rng);

// q(t) proportional to (E[n_dt]+gamma_t)(E[n_tv]+beta)/(E[n_t]+V beta) over
// excluded moments. Output sums to 1.
void cvb0_update(const Excluded& ex, const Hyperparams& h,
                 std::span<double> out);

// CVB0 factor times the second-order Taylor corrections; requires variances.
void cvb_update(const Excluded& ex, const Hyperparams& h,
                std::span<double> out);

// Type-level zero-order update; identical arithmetic on type-excluded moments.
inline void tcvb0_update(const Excluded& ex, const Hyperparams& h,
                         std::span<double> out) {
  cvb0_update(ex, h, out);
}

// Deterministic approximation of E[1/(n_t + V beta)]:
// 1/(E + V beta) + Var/(E + V beta)^3.
double cvb1d_c_factor(double e_t_excl, double var_t_excl, double vbeta);

// Sample average (1/S) sum_s 1/(n_t(z^(s)) + V beta) with z^(s) drawn fresh
// from the factorized q over all tokens except `excluded_flat`. Unbiased for
// the alpha = 1 expectation; one entry per topic.
std::vector<double> cvb1s_c_factors(const TrainView& view,
                                    const TokenPosterior& q,
                                    int64_t excluded_flat, int samples,
                                    const Hyperparams& h, std::mt19937_64& rng);
double cvb1s_c_factor(const TrainView& view, const TokenPosterior& q,
                      int64_t excluded_flat, int topic, int samples,
                      const Hyperparams& h, std::mt19937_64& rng);

// The three per-topic projection parameters. Closed forms exist for
// alpha_a = alpha_b = 1 with alpha_c in {-1, +1}; the +1 c factor comes from
// the Taylor approximation, or from `sampled_c` when the caller provides it.
struct ProjectionFactors {
  std::vector<double> a, b, c;
};

ProjectionFactors projection_factors(const Excluded& ex, const Hyperparams& h,
                                     double alpha_a, double alpha_b,
                                     double alpha_c,
                                     std::span<const double> sampled_c = {});

// Minka's fixed point for the asymmetric document-topic Dirichlet:
//   gamma_t *= [sum_d psi(E[n_dt]+gamma_t) - D psi(gamma_t)]
//            / [sum_d psi(n_d+sum gamma)   - D psi(sum gamma)]
// iterated to relative change < 1e-6 (at most 100 steps), floored at 1e-5.
void estimate_gamma(const MomentTable& m, std::vector<double>& gamma);
void estimate_gamma(std::span<const double> e_dt, std::span<const int32_t> n_d,
                    int docs, std::vector<double>& gamma);

// ---- full runs -------------------------------------------------------------

struct IterationRecord {
  int iteration = 0;  // 0 is the pre-sweep anchor from random initialization
  double perplexity = 0.0;
  double seconds = 0.0;
};

// One seeded inference run over the training side of a split. Sweeps are
// serial and deterministic given the config seed.
class InferenceRun {
 public:
  InferenceRun(const InferenceConfig& config, const Corpus& corpus,
               const HoldoutSplit& split);

  // One full pass over the corpus, followed by the gamma fixed point (when
  // enabled) and a periodic full rebuild of the moment table.
  void sweep();

  int iteration() const { return iteration_; }
  const InferenceConfig& config() const { return config_; }
  const Hyperparams& hyper() const { return hyper_; }
  const TrainView& view() const { return view_; }

  PointEstimates estimates() const;
  double current_perplexity() const;

  // Variational state accessors (throw for Gibbs).
  const MomentTable& moments() const;
  MomentTable rebuild_moments() const;
  const TokenPosterior& token_posterior() const;
  // Gibbs state accessor (throws otherwise).
  const HardAssignment& hard_state() const;

  // Checkpointing: everything needed to resume bit-identically in serial
  // mode (posteriors, moments, counts, sampled-count tables, gamma, RNG).
  void save(std::ostream& out) const;
  static InferenceRun load(std::istream& in, const Corpus& corpus,
                           const HoldoutSplit& split);

 private:
  InferenceRun() = default;

  void init(const Corpus& corpus, const HoldoutSplit& split);
  void variational_sweep();
  void tcvb0_sweep();
  void after_sweep();
  void rebuild();

  InferenceConfig config_;
  Hyperparams hyper_;
  const Corpus* corpus_ = nullptr;
  const HoldoutSplit* split_ = nullptr;
  TrainView view_;
  TypeView type_view_;
  std::mt19937_64 rng_;
  int iteration_ = 0;

  HardAssignment hard_;
  TokenPosterior q_;
  TypePosterior type_q_;
  MomentTable moments_;

  // CVB1S persistent sample worlds: per-token assignments and their global
  // per-topic tallies, resampled from each token's q right after its update.
  std::vector<int32_t> sample_z_;   // tokens x S
  std::vector<int32_t> sample_nt_;  // S x T

  Excluded scratch_;
  std::vector<double> q_old_, q_new_, c_buf_;
};

struct RunOutput {
  std::vector<IterationRecord> trace;  // iteration 0 .. iterations
  PointEstimates final_estimates;
};

// Initializes from config.seed, records the iteration-0 anchor, then sweeps
// `iterations` times recording held-out perplexity after each sweep.
RunOutput run_inference(const InferenceConfig& config, const Corpus& corpus,
                        const HoldoutSplit& split,
                        bool record_wall_time = true);

}  // namespace alphalda
