#include "alphalda/inference.hpp"

#include <boost/math/special_functions/digamma.hpp>
#include <chrono>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "alphalda/kernels.hpp"

namespace alphalda {

namespace {

constexpr double kGammaFloor = 1e-5;
constexpr double kGammaFixedPointTol = 1e-6;
constexpr int kGammaFixedPointMaxIter = 100;

int32_t sample_discrete(std::span<const double> weights, double total,
                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, total);
  const double u = unif(rng);
  double acc = 0.0;
  for (std::size_t t = 0; t + 1 < weights.size(); ++t) {
    acc += weights[t];
    if (u < acc) return static_cast<int32_t>(t);
  }
  return static_cast<int32_t>(weights.size()) - 1;
}

}  // namespace

std::string_view algorithm_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::kGibbs: return "gibbs";
    case AlgorithmKind::kCvb: return "cvb";
    case AlgorithmKind::kCvb0: return "cvb0";
    case AlgorithmKind::kCvb1s: return "cvb1s";
    case AlgorithmKind::kCvb1d: return "cvb1d";
    case AlgorithmKind::kTcvb0: return "tcvb0";
  }
  return "unknown";
}

std::optional<AlgorithmKind> parse_algorithm(std::string_view name) {
  for (AlgorithmKind kind : kAllAlgorithms) {
    if (name == algorithm_name(kind)) return kind;
  }
  return std::nullopt;
}

std::vector<double> symmetric_gamma(int topics) {
  if (topics < 1) throw std::invalid_argument("topics must be >= 1");
  return std::vector<double>(topics, 50.0 / topics);
}

void InferenceConfig::validate() const {
  if (topics < 1) throw std::invalid_argument("topics must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (gamma.size() != static_cast<std::size_t>(topics)) {
    throw std::invalid_argument("gamma must have one entry per topic");
  }
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("gamma entries must be > 0");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (gamma_burnin < 0) {
    throw std::invalid_argument("gamma burn-in must be >= 0");
  }
  if (rebuild_period < 1) {
    throw std::invalid_argument("rebuild period must be >= 1");
  }
  if (algorithm == AlgorithmKind::kCvb1s && sample_count < 1) {
    throw std::invalid_argument("sample count must be >= 1");
  }
}

void gibbs_conditional(const HardAssignment& counts, int d, int32_t v,
                       const Hyperparams& h, std::span<double> out) {
  const int T = counts.T;
  const double vbeta = h.vbeta();
  const int32_t* n_dt = counts.n_dt.data() + static_cast<std::size_t>(d) * T;
  const int32_t* n_tv = counts.n_tv.data() + static_cast<std::size_t>(v) * T;
  double total = 0.0;
  for (int t = 0; t < T; ++t) {
    out[t] = (n_tv[t] + h.beta) / (counts.n_t[t] + vbeta) *
             (n_dt[t] + h.gamma[t]);
    total += out[t];
  }
  kern::active().scale(out.data(), 1.0 / total, T);
}

void gibbs_sweep(HardAssignment& state, const TrainView& view,
                 const Hyperparams& h, std::mt19937_64& rng) {
  const int T = state.T;
  const double vbeta = h.vbeta();
  std::vector<double> w(T);
  for (int d = 0; d < view.D; ++d) {
    int32_t* n_dt = state.n_dt.data() + static_cast<std::size_t>(d) * T;
    for (int64_t i = view.doc_begin(d); i < view.doc_end(d); ++i) {
      const int32_t v = view.word[i];
      int32_t* n_tv = state.n_tv.data() + static_cast<std::size_t>(v) * T;
      const int32_t old = state.z[i];
      --n_dt[old];
      --n_tv[old];
      --state.n_t[old];
      double total = 0.0;
      for (int t = 0; t < T; ++t) {
        w[t] = (n_tv[t] + h.beta) / (state.n_t[t] + vbeta) *
               (n_dt[t] + h.gamma[t]);
        total += w[t];
      }
      const int32_t pick = sample_discrete(w, total, rng);
      state.z[i] = pick;
      ++n_dt[pick];
      ++n_tv[pick];
      ++state.n_t[pick];
    }
  }
}

void cvb0_update(const Excluded& ex, const Hyperparams& h,
                 std::span<double> out) {
  const std::size_t T = h.gamma.size();
  const auto& k = kern::active();
  k.cvb0_weights(out.data(), ex.e_dt.data(), h.gamma.data(), ex.e_tv.data(),
                 h.beta, ex.e_t.data(), h.vbeta(), T);
  kern::normalize(out.data(), T);
}

void cvb_update(const Excluded& ex, const Hyperparams& h,
                std::span<double> out) {
  if (!ex.with_var) {
    throw std::invalid_argument("cvb_update requires excluded variances");
  }
  const std::size_t T = h.gamma.size();
  const auto& k = kern::active();
  k.cvb0_weights(out.data(), ex.e_dt.data(), h.gamma.data(), ex.e_tv.data(),
                 h.beta, ex.e_t.data(), h.vbeta(), T);
  k.cvb_correction(out.data(), ex.e_dt.data(), h.gamma.data(),
                   ex.var_dt.data(), ex.e_tv.data(), h.beta, ex.var_tv.data(),
                   ex.e_t.data(), h.vbeta(), ex.var_t.data(), T);
  kern::normalize(out.data(), T);
}

double cvb1d_c_factor(double e_t_excl, double var_t_excl, double vbeta) {
  const double denom = e_t_excl + vbeta;
  return 1.0 / denom + var_t_excl / (denom * denom * denom);
}

std::vector<double> cvb1s_c_factors(const TrainView& view,
                                    const TokenPosterior& q,
                                    int64_t excluded_flat, int samples,
                                    const Hyperparams& h,
                                    std::mt19937_64& rng) {
  if (samples < 1) throw std::invalid_argument("sample count must be >= 1");
  const int T = q.T;
  const double vbeta = h.vbeta();
  const int64_t n = view.total_tokens();
  std::vector<double> acc(T, 0.0);
  std::vector<int32_t> nt(T);
  for (int s = 0; s < samples; ++s) {
    std::fill(nt.begin(), nt.end(), 0);
    for (int64_t j = 0; j < n; ++j) {
      if (j == excluded_flat) continue;
      ++nt[sample_discrete(q.at(j), 1.0, rng)];
    }
    for (int t = 0; t < T; ++t) acc[t] += 1.0 / (nt[t] + vbeta);
  }
  for (double& a : acc) a /= samples;
  return acc;
}

double cvb1s_c_factor(const TrainView& view, const TokenPosterior& q,
                      int64_t excluded_flat, int topic, int samples,
                      const Hyperparams& h, std::mt19937_64& rng) {
  return cvb1s_c_factors(view, q, excluded_flat, samples, h, rng)[topic];
}

ProjectionFactors projection_factors(const Excluded& ex, const Hyperparams& h,
                                     double alpha_a, double alpha_b,
                                     double alpha_c,
                                     std::span<const double> sampled_c) {
  if (alpha_a != 1.0 || alpha_b != 1.0) {
    throw std::invalid_argument(
        "closed-form projection factors require alpha_a = alpha_b = 1");
  }
  if (alpha_c != 1.0 && alpha_c != -1.0) {
    throw std::invalid_argument("alpha_c must be 1 or -1 in closed form");
  }
  const int T = h.topics();
  const double vbeta = h.vbeta();
  ProjectionFactors f;
  f.a.resize(T);
  f.b.resize(T);
  f.c.resize(T);
  for (int t = 0; t < T; ++t) {
    f.a[t] = ex.e_dt[t] + h.gamma[t];
    f.b[t] = ex.e_tv[t] + h.beta;
  }
  if (alpha_c == -1.0) {
    for (int t = 0; t < T; ++t) f.c[t] = 1.0 / (ex.e_t[t] + vbeta);
  } else if (!sampled_c.empty()) {
    if (sampled_c.size() != static_cast<std::size_t>(T)) {
      throw std::invalid_argument("sampled c factor has wrong length");
    }
    std::copy(sampled_c.begin(), sampled_c.end(), f.c.begin());
  } else {
    if (!ex.with_var) {
      throw std::invalid_argument(
          "alpha_c = 1 needs excluded variances or a sampled c factor");
    }
    for (int t = 0; t < T; ++t) {
      f.c[t] = cvb1d_c_factor(ex.e_t[t], ex.var_t[t], vbeta);
    }
  }
  return f;
}

void estimate_gamma(std::span<const double> e_dt, std::span<const int32_t> n_d,
                    int docs, std::vector<double>& gamma) {
  const int T = static_cast<int>(gamma.size());
  std::vector<double> next(T);
  for (int step = 0; step < kGammaFixedPointMaxIter; ++step) {
    const double gsum = kern::active().sum(gamma.data(), T);
    double denom = 0.0;
    for (int d = 0; d < docs; ++d) {
      denom += boost::math::digamma(n_d[d] + gsum);
    }
    denom -= docs * boost::math::digamma(gsum);
    if (!(denom > 0.0)) return;  // no covered tokens; nothing to fit

    double max_rel = 0.0;
    for (int t = 0; t < T; ++t) {
      double num = 0.0;
      for (int d = 0; d < docs; ++d) {
        num += boost::math::digamma(e_dt[static_cast<std::size_t>(d) * T + t] +
                                    gamma[t]);
      }
      num -= docs * boost::math::digamma(gamma[t]);
      double updated = gamma[t] * num / denom;
      if (!std::isfinite(updated)) {
        throw std::runtime_error("gamma fixed point produced non-finite value");
      }
      if (updated < kGammaFloor) updated = kGammaFloor;
      max_rel = std::max(max_rel, std::abs(updated - gamma[t]) / gamma[t]);
      next[t] = updated;
    }
    gamma = next;
    if (max_rel < kGammaFixedPointTol) break;
  }
}

void estimate_gamma(const MomentTable& m, std::vector<double>& gamma) {
  if (m.T() != static_cast<int>(gamma.size())) {
    throw std::invalid_argument("gamma length disagrees with moment table");
  }
  std::vector<int32_t> n_d(m.D());
  for (int d = 0; d < m.D(); ++d) n_d[d] = m.doc_tokens(d);
  const std::span<const double> e_dt{m.doc_row(0).data(),
                                     static_cast<std::size_t>(m.D()) * m.T()};
  estimate_gamma(e_dt, n_d, m.D(), gamma);
}

// ---- InferenceRun ----------------------------------------------------------

InferenceRun::InferenceRun(const InferenceConfig& config, const Corpus& corpus,
                           const HoldoutSplit& split)
    : config_(config) {
  config_.validate();
  init(corpus, split);

  const int T = config_.topics;
  rng_.seed(config_.seed);
  switch (config_.algorithm) {
    case AlgorithmKind::kGibbs:
      hard_ = HardAssignment::random_init(view_, T, rng_);
      break;
    case AlgorithmKind::kTcvb0:
      type_q_ = TypePosterior::random_init(type_view_, T, rng_);
      moments_ = MomentTable::from_types(type_view_, type_q_, false);
      break;
    case AlgorithmKind::kCvb:
    case AlgorithmKind::kCvb1d:
      q_ = TokenPosterior::random_init(view_, T, rng_);
      moments_ = MomentTable::from_tokens(view_, q_, true);
      break;
    case AlgorithmKind::kCvb0:
      q_ = TokenPosterior::random_init(view_, T, rng_);
      moments_ = MomentTable::from_tokens(view_, q_, false);
      break;
    case AlgorithmKind::kCvb1s: {
      q_ = TokenPosterior::random_init(view_, T, rng_);
      moments_ = MomentTable::from_tokens(view_, q_, false);
      const int S = config_.sample_count;
      sample_z_.resize(view_.total_tokens() * S);
      sample_nt_.assign(static_cast<std::size_t>(S) * T, 0);
      for (int64_t i = 0; i < view_.total_tokens(); ++i) {
        for (int s = 0; s < S; ++s) {
          const int32_t t = sample_discrete(q_.at(i), 1.0, rng_);
          sample_z_[i * S + s] = t;
          ++sample_nt_[static_cast<std::size_t>(s) * T + t];
        }
      }
      break;
    }
  }
}

void InferenceRun::init(const Corpus& corpus, const HoldoutSplit& split) {
  corpus_ = &corpus;
  split_ = &split;
  hyper_.gamma = config_.gamma;
  hyper_.beta = config_.beta;
  hyper_.vocab_size = corpus.vocab_size();
  hyper_.validate();
  view_ = TrainView::training(corpus, split);
  if (config_.algorithm == AlgorithmKind::kTcvb0) {
    type_view_ = TypeView::training(corpus, split);
  }
  const bool with_var = config_.algorithm == AlgorithmKind::kCvb ||
                        config_.algorithm == AlgorithmKind::kCvb1d;
  scratch_.resize(config_.topics, with_var);
  q_old_.resize(config_.topics);
  q_new_.resize(config_.topics);
  c_buf_.resize(config_.topics);
}

void InferenceRun::variational_sweep() {
  const int T = config_.topics;
  const int S = config_.sample_count;
  const double vbeta = hyper_.vbeta();
  for (int d = 0; d < view_.D; ++d) {
    for (int64_t i = view_.doc_begin(d); i < view_.doc_end(d); ++i) {
      const int32_t pos = view_.position[i];
      const int32_t v = view_.word[i];
      const auto stored = q_.at(i);
      std::copy(stored.begin(), stored.end(), q_old_.begin());
      moments_.exclude_token(d, pos, v, q_old_, scratch_);

      switch (config_.algorithm) {
        case AlgorithmKind::kCvb0:
          cvb0_update(scratch_, hyper_, q_new_);
          break;
        case AlgorithmKind::kCvb:
          cvb_update(scratch_, hyper_, q_new_);
          break;
        case AlgorithmKind::kCvb1d:
          for (int t = 0; t < T; ++t) {
            q_new_[t] = (scratch_.e_dt[t] + hyper_.gamma[t]) *
                        (scratch_.e_tv[t] + hyper_.beta) *
                        cvb1d_c_factor(scratch_.e_t[t], scratch_.var_t[t],
                                       vbeta);
          }
          kern::normalize(q_new_.data(), T);
          break;
        case AlgorithmKind::kCvb1s: {
          // Sample average of 1/(n_t + V beta) over the S persistent worlds,
          // with this token's own sampled assignment taken out.
          std::fill(c_buf_.begin(), c_buf_.end(), 0.0);
          const int32_t* zi = sample_z_.data() + i * S;
          for (int s = 0; s < S; ++s) {
            const int32_t* nt =
                sample_nt_.data() + static_cast<std::size_t>(s) * T;
            const int32_t zs = zi[s];
            for (int t = 0; t < T; ++t) {
              c_buf_[t] += 1.0 / (nt[t] - (t == zs ? 1 : 0) + vbeta);
            }
          }
          for (int t = 0; t < T; ++t) {
            q_new_[t] = (scratch_.e_dt[t] + hyper_.gamma[t]) *
                        (scratch_.e_tv[t] + hyper_.beta) * (c_buf_[t] / S);
          }
          kern::normalize(q_new_.data(), T);
          break;
        }
        default:
          throw std::logic_error("not a token-variational algorithm");
      }

      moments_.include_token(d, pos, v, q_old_, q_new_);
      std::copy(q_new_.begin(), q_new_.end(), stored.begin());

      if (config_.algorithm == AlgorithmKind::kCvb1s) {
        int32_t* zi = sample_z_.data() + i * S;
        for (int s = 0; s < S; ++s) {
          const int32_t t = sample_discrete(q_new_, 1.0, rng_);
          if (t != zi[s]) {
            --sample_nt_[static_cast<std::size_t>(s) * T + zi[s]];
            ++sample_nt_[static_cast<std::size_t>(s) * T + t];
            zi[s] = t;
          }
        }
      }
    }
  }
}

void InferenceRun::tcvb0_sweep() {
  for (int d = 0; d < type_view_.D; ++d) {
    for (int64_t i = type_view_.doc_begin(d); i < type_view_.doc_end(d); ++i) {
      const int32_t v = type_view_.word[i];
      const int32_t count = type_view_.count[i];
      const auto stored = type_q_.at(i);
      std::copy(stored.begin(), stored.end(), q_old_.begin());
      moments_.exclude_type(d, v, q_old_, count, scratch_);
      tcvb0_update(scratch_, hyper_, q_new_);
      moments_.include_type(d, v, q_old_, q_new_, count);
      std::copy(q_new_.begin(), q_new_.end(), stored.begin());
    }
  }
}

void InferenceRun::sweep() {
  switch (config_.algorithm) {
    case AlgorithmKind::kGibbs:
      gibbs_sweep(hard_, view_, hyper_, rng_);
      break;
    case AlgorithmKind::kTcvb0:
      tcvb0_sweep();
      break;
    default:
      variational_sweep();
      break;
  }
  after_sweep();
}

void InferenceRun::after_sweep() {
  ++iteration_;
  if (config_.update_gamma && iteration_ > config_.gamma_burnin) {
    if (config_.algorithm == AlgorithmKind::kGibbs) {
      std::vector<double> e_dt(hard_.n_dt.begin(), hard_.n_dt.end());
      std::vector<int32_t> n_d(view_.D);
      for (int d = 0; d < view_.D; ++d) n_d[d] = view_.doc_tokens(d);
      estimate_gamma(e_dt, n_d, view_.D, hyper_.gamma);
    } else {
      estimate_gamma(moments_, hyper_.gamma);
    }
  }
  if (config_.algorithm != AlgorithmKind::kGibbs &&
      iteration_ % config_.rebuild_period == 0) {
    rebuild();
  }
}

void InferenceRun::rebuild() {
  const bool with_var = moments_.with_variances();
  if (config_.algorithm == AlgorithmKind::kTcvb0) {
    moments_ = MomentTable::from_types(type_view_, type_q_, with_var);
  } else {
    moments_ = MomentTable::from_tokens(view_, q_, with_var);
  }
}

MomentTable InferenceRun::rebuild_moments() const {
  if (config_.algorithm == AlgorithmKind::kGibbs) {
    throw std::logic_error("gibbs keeps integer counts, not moments");
  }
  if (config_.algorithm == AlgorithmKind::kTcvb0) {
    return MomentTable::from_types(type_view_, type_q_,
                                   moments_.with_variances());
  }
  return MomentTable::from_tokens(view_, q_, moments_.with_variances());
}

PointEstimates InferenceRun::estimates() const {
  if (config_.algorithm == AlgorithmKind::kGibbs) {
    return point_estimates(hard_, hyper_);
  }
  return point_estimates(moments_, hyper_);
}

double InferenceRun::current_perplexity() const {
  return perplexity(estimates(), *corpus_, *split_);
}

const MomentTable& InferenceRun::moments() const {
  if (config_.algorithm == AlgorithmKind::kGibbs) {
    throw std::logic_error("gibbs keeps integer counts, not moments");
  }
  return moments_;
}

const TokenPosterior& InferenceRun::token_posterior() const {
  if (config_.algorithm == AlgorithmKind::kGibbs ||
      config_.algorithm == AlgorithmKind::kTcvb0) {
    throw std::logic_error("no token posterior for this algorithm");
  }
  return q_;
}

const HardAssignment& InferenceRun::hard_state() const {
  if (config_.algorithm != AlgorithmKind::kGibbs) {
    throw std::logic_error("hard assignments exist only for gibbs");
  }
  return hard_;
}

RunOutput run_inference(const InferenceConfig& config, const Corpus& corpus,
                        const HoldoutSplit& split, bool record_wall_time) {
  config.validate();
  InferenceRun run(config, corpus, split);
  RunOutput out;
  out.trace.reserve(config.iterations + 1);
  out.trace.push_back({0, run.current_perplexity(), 0.0});
  for (int it = 1; it <= config.iterations; ++it) {
    const auto start = std::chrono::steady_clock::now();
    run.sweep();
    double seconds = 0.0;
    if (record_wall_time) {
      seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    }
    out.trace.push_back({it, run.current_perplexity(), seconds});
  }
  out.final_estimates = run.estimates();
  return out;
}

// ---- checkpointing ---------------------------------------------------------

namespace {

constexpr uint32_t kCheckpointMagic = 0x414c4441;  // "ALDA"
constexpr uint32_t kCheckpointVersion = 1;

template <class T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return value;
}

template <class T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  write_pod<uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> read_vec(std::istream& in) {
  const uint64_t n = read_pod<uint64_t>(in);
  std::vector<T> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(T)));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return v;
}

void write_string(std::ostream& out, const std::string& s) {
  write_pod<uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
  const uint64_t n = read_pod<uint64_t>(in);
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return s;
}

}  // namespace

struct MomentTableIo {
  static void save(std::ostream& out, const MomentTable& m) {
    write_pod<int32_t>(out, m.d_);
    write_pod<int32_t>(out, m.v_);
    write_pod<int32_t>(out, m.t_);
    write_pod<uint8_t>(out, m.with_var_ ? 1 : 0);
    write_pod<int64_t>(out, m.covered_);
    write_vec(out, m.doc_tokens_);
    write_vec(out, m.e_dt_);
    write_vec(out, m.e_tv_);
    write_vec(out, m.e_t_);
    if (m.with_var_) {
      write_vec(out, m.var_dt_);
      write_vec(out, m.var_tv_);
      write_vec(out, m.var_t_);
    }
  }

  static MomentTable load(std::istream& in) {
    MomentTable m;
    m.d_ = read_pod<int32_t>(in);
    m.v_ = read_pod<int32_t>(in);
    m.t_ = read_pod<int32_t>(in);
    m.with_var_ = read_pod<uint8_t>(in) != 0;
    m.covered_ = read_pod<int64_t>(in);
    m.doc_tokens_ = read_vec<int32_t>(in);
    m.e_dt_ = read_vec<double>(in);
    m.e_tv_ = read_vec<double>(in);
    m.e_t_ = read_vec<double>(in);
    if (m.with_var_) {
      m.var_dt_ = read_vec<double>(in);
      m.var_tv_ = read_vec<double>(in);
      m.var_t_ = read_vec<double>(in);
    }
    return m;
  }
};

void InferenceRun::save(std::ostream& out) const {
  write_pod(out, kCheckpointMagic);
  write_pod(out, kCheckpointVersion);
  write_pod<int32_t>(out, config_.topics);
  write_pod<int32_t>(out, config_.iterations);
  write_pod<uint64_t>(out, config_.seed);
  write_pod<uint8_t>(out, static_cast<uint8_t>(config_.algorithm));
  write_pod<double>(out, config_.beta);
  write_pod<uint8_t>(out, config_.update_gamma ? 1 : 0);
  write_pod<int32_t>(out, config_.gamma_burnin);
  write_pod<int32_t>(out, config_.rebuild_period);
  write_pod<int32_t>(out, config_.sample_count);
  write_vec(out, config_.gamma);
  write_vec(out, hyper_.gamma);
  write_pod<int32_t>(out, iteration_);
  std::ostringstream rng_text;
  rng_text << rng_;
  write_string(out, rng_text.str());

  write_pod<int32_t>(out, view_.D);
  write_pod<int32_t>(out, view_.V);
  write_pod<int64_t>(out, view_.total_tokens());

  switch (config_.algorithm) {
    case AlgorithmKind::kGibbs:
      write_vec(out, hard_.z);
      write_vec(out, hard_.n_dt);
      write_vec(out, hard_.n_tv);
      write_vec(out, hard_.n_t);
      break;
    case AlgorithmKind::kTcvb0:
      write_vec(out, type_q_.q);
      MomentTableIo::save(out, moments_);
      break;
    default:
      write_vec(out, q_.q);
      MomentTableIo::save(out, moments_);
      if (config_.algorithm == AlgorithmKind::kCvb1s) {
        write_vec(out, sample_z_);
        write_vec(out, sample_nt_);
      }
      break;
  }
  if (!out) throw std::runtime_error("checkpoint write failed");
}

InferenceRun InferenceRun::load(std::istream& in, const Corpus& corpus,
                                const HoldoutSplit& split) {
  if (read_pod<uint32_t>(in) != kCheckpointMagic) {
    throw std::runtime_error("not a checkpoint file");
  }
  if (read_pod<uint32_t>(in) != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version");
  }
  InferenceRun run;
  run.config_.topics = read_pod<int32_t>(in);
  run.config_.iterations = read_pod<int32_t>(in);
  run.config_.seed = read_pod<uint64_t>(in);
  run.config_.algorithm = static_cast<AlgorithmKind>(read_pod<uint8_t>(in));
  run.config_.beta = read_pod<double>(in);
  run.config_.update_gamma = read_pod<uint8_t>(in) != 0;
  run.config_.gamma_burnin = read_pod<int32_t>(in);
  run.config_.rebuild_period = read_pod<int32_t>(in);
  run.config_.sample_count = read_pod<int32_t>(in);
  run.config_.gamma = read_vec<double>(in);
  run.config_.validate();
  run.init(corpus, split);
  run.hyper_.gamma = read_vec<double>(in);
  run.iteration_ = read_pod<int32_t>(in);
  std::istringstream rng_text(read_string(in));
  rng_text >> run.rng_;

  if (read_pod<int32_t>(in) != run.view_.D ||
      read_pod<int32_t>(in) != run.view_.V ||
      read_pod<int64_t>(in) != run.view_.total_tokens()) {
    throw std::runtime_error("checkpoint disagrees with corpus/split");
  }

  const int T = run.config_.topics;
  switch (run.config_.algorithm) {
    case AlgorithmKind::kGibbs:
      run.hard_.T = T;
      run.hard_.z = read_vec<int32_t>(in);
      run.hard_.n_dt = read_vec<int32_t>(in);
      run.hard_.n_tv = read_vec<int32_t>(in);
      run.hard_.n_t = read_vec<int64_t>(in);
      run.hard_.check_tallies(run.view_);
      break;
    case AlgorithmKind::kTcvb0:
      run.type_q_.T = T;
      run.type_q_.q = read_vec<double>(in);
      run.moments_ = MomentTableIo::load(in);
      break;
    default:
      run.q_.T = T;
      run.q_.q = read_vec<double>(in);
      run.moments_ = MomentTableIo::load(in);
      if (run.config_.algorithm == AlgorithmKind::kCvb1s) {
        run.sample_z_ = read_vec<int32_t>(in);
        run.sample_nt_ = read_vec<int32_t>(in);
      }
      break;
  }
  return run;
}

}  // namespace alphalda
