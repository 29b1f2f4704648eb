#include "alphalda/stats.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "alphalda/kernels.hpp"

namespace alphalda {

namespace {

// Rounding debris from the exclude/include cycle may push a value a hair
// below zero; anything past the tolerance is a logic bug, not noise.
constexpr double kNegativeTolerance = -1e-9;

void clamp_nonnegative(std::vector<double>& x, const char* table) {
  for (double& v : x) {
    if (v < 0.0) {
      if (v < kNegativeTolerance) {
        throw std::runtime_error(
            std::string("negative excluded value in ") + table +
            ": statistics and posterior are out of sync");
      }
      v = 0.0;
    }
  }
}

void dirichlet1_row(std::span<double> row, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  double total = 0.0;
  for (double& r : row) {
    r = expo(rng);
    total += r;
  }
  for (double& r : row) r /= total;
}

}  // namespace

double Hyperparams::gamma_sum() const {
  return kern::active().sum(gamma.data(), gamma.size());
}

void Hyperparams::validate() const {
  if (gamma.empty()) throw std::invalid_argument("gamma must be nonempty");
  for (double g : gamma) {
    if (!(g > 0.0)) throw std::invalid_argument("gamma entries must be > 0");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be > 0");
  if (vocab_size < 1) throw std::invalid_argument("vocab_size must be >= 1");
}

TrainView TrainView::covering(const Corpus& corpus) {
  TrainView view;
  view.D = corpus.num_documents();
  view.V = corpus.vocab_size();
  view.doc_offset.reserve(view.D + 1);
  view.doc_offset.push_back(0);
  for (const Document& doc : corpus.documents) {
    for (int32_t i = 0; i < doc.length(); ++i) {
      view.position.push_back(i);
      view.word.push_back(doc.tokens[i]);
    }
    view.doc_offset.push_back(static_cast<int64_t>(view.word.size()));
  }
  return view;
}

TrainView TrainView::training(const Corpus& corpus, const HoldoutSplit& split) {
  TrainView view;
  view.D = corpus.num_documents();
  view.V = corpus.vocab_size();
  view.doc_offset.reserve(view.D + 1);
  view.doc_offset.push_back(0);
  for (int d = 0; d < view.D; ++d) {
    for (int32_t pos : split.train_indices[d]) {
      view.position.push_back(pos);
      view.word.push_back(corpus.documents[d].tokens[pos]);
    }
    view.doc_offset.push_back(static_cast<int64_t>(view.word.size()));
  }
  return view;
}

int64_t TypeView::covered_tokens() const {
  int64_t total = 0;
  for (int32_t c : count) total += c;
  return total;
}

namespace {

TypeView build_type_view(const Corpus& corpus,
                         const std::vector<std::vector<int32_t>>* train) {
  TypeView view;
  view.D = corpus.num_documents();
  view.V = corpus.vocab_size();
  view.doc_offset.reserve(view.D + 1);
  view.doc_offset.push_back(0);
  std::vector<int64_t> slot(view.V, -1);
  std::vector<int32_t> touched;
  for (int d = 0; d < view.D; ++d) {
    const Document& doc = corpus.documents[d];
    auto visit = [&](int32_t pos) {
      const int32_t w = doc.tokens[pos];
      if (slot[w] < 0) {
        slot[w] = static_cast<int64_t>(view.word.size());
        view.word.push_back(w);
        view.count.push_back(0);
        touched.push_back(w);
      }
      ++view.count[slot[w]];
    };
    if (train) {
      for (int32_t pos : (*train)[d]) visit(pos);
    } else {
      for (int32_t pos = 0; pos < doc.length(); ++pos) visit(pos);
    }
    view.doc_offset.push_back(static_cast<int64_t>(view.word.size()));
    for (int32_t w : touched) slot[w] = -1;
    touched.clear();
  }
  return view;
}

}  // namespace

TypeView TypeView::covering(const Corpus& corpus) {
  return build_type_view(corpus, nullptr);
}

TypeView TypeView::training(const Corpus& corpus, const HoldoutSplit& split) {
  return build_type_view(corpus, &split.train_indices);
}

TokenPosterior TokenPosterior::random_init(const TrainView& view, int topics,
                                           std::mt19937_64& rng) {
  TokenPosterior posterior;
  posterior.T = topics;
  posterior.q.resize(view.total_tokens() * topics);
  for (int64_t i = 0; i < view.total_tokens(); ++i) {
    dirichlet1_row(posterior.at(i), rng);
  }
  return posterior;
}

TypePosterior TypePosterior::random_init(const TypeView& view, int topics,
                                         std::mt19937_64& rng) {
  TypePosterior posterior;
  posterior.T = topics;
  posterior.q.resize(view.total_types() * topics);
  for (int64_t i = 0; i < view.total_types(); ++i) {
    dirichlet1_row(posterior.at(i), rng);
  }
  return posterior;
}

HardAssignment HardAssignment::random_init(const TrainView& view, int topics,
                                           std::mt19937_64& rng) {
  HardAssignment state;
  state.T = topics;
  state.z.resize(view.total_tokens());
  state.n_dt.assign(static_cast<std::size_t>(view.D) * topics, 0);
  state.n_tv.assign(static_cast<std::size_t>(view.V) * topics, 0);
  state.n_t.assign(topics, 0);
  std::uniform_int_distribution<int32_t> pick(0, topics - 1);
  for (int d = 0; d < view.D; ++d) {
    for (int64_t i = view.doc_begin(d); i < view.doc_end(d); ++i) {
      const int32_t t = pick(rng);
      state.z[i] = t;
      ++state.n_dt[static_cast<std::size_t>(d) * topics + t];
      ++state.n_tv[static_cast<std::size_t>(view.word[i]) * topics + t];
      ++state.n_t[t];
    }
  }
  return state;
}

void HardAssignment::check_tallies(const TrainView& view) const {
  std::vector<int32_t> dt(n_dt.size(), 0), tv(n_tv.size(), 0);
  std::vector<int64_t> nt(n_t.size(), 0);
  for (int d = 0; d < view.D; ++d) {
    for (int64_t i = view.doc_begin(d); i < view.doc_end(d); ++i) {
      const int32_t t = z[i];
      ++dt[static_cast<std::size_t>(d) * T + t];
      ++tv[static_cast<std::size_t>(view.word[i]) * T + t];
      ++nt[t];
    }
  }
  if (dt != n_dt || tv != n_tv || nt != n_t) {
    throw std::runtime_error("hard assignment count tables disagree with z");
  }
}

void Excluded::resize(int topics, bool variances) {
  e_dt.resize(topics);
  e_tv.resize(topics);
  e_t.resize(topics);
  with_var = variances;
  if (variances) {
    var_dt.resize(topics);
    var_tv.resize(topics);
    var_t.resize(topics);
  }
}

MomentTable MomentTable::from_tokens(const TrainView& view,
                                     const TokenPosterior& posterior,
                                     bool with_variances) {
  if (posterior.q.size() !=
      static_cast<std::size_t>(view.total_tokens()) * posterior.T) {
    throw std::invalid_argument("posterior does not cover the view");
  }
  MomentTable m;
  m.d_ = view.D;
  m.v_ = view.V;
  m.t_ = posterior.T;
  m.with_var_ = with_variances;
  m.covered_ = view.total_tokens();
  m.doc_tokens_.resize(view.D);
  m.e_dt_.assign(static_cast<std::size_t>(view.D) * m.t_, 0.0);
  m.e_tv_.assign(static_cast<std::size_t>(view.V) * m.t_, 0.0);
  m.e_t_.assign(m.t_, 0.0);
  if (with_variances) {
    m.var_dt_.assign(m.e_dt_.size(), 0.0);
    m.var_tv_.assign(m.e_tv_.size(), 0.0);
    m.var_t_.assign(m.t_, 0.0);
  }

  const auto& k = kern::active();
  std::vector<double> vd(m.t_);
  for (int d = 0; d < view.D; ++d) {
    m.doc_tokens_[d] = view.doc_tokens(d);
    double* doc = m.e_dt_.data() + static_cast<std::size_t>(d) * m.t_;
    for (int64_t i = view.doc_begin(d); i < view.doc_end(d); ++i) {
      const double* q = posterior.q.data() + i * m.t_;
      double* wrd = m.e_tv_.data() + static_cast<std::size_t>(view.word[i]) * m.t_;
      k.axpy(doc, 1.0, q, m.t_);
      k.axpy(wrd, 1.0, q, m.t_);
      k.axpy(m.e_t_.data(), 1.0, q, m.t_);
      if (with_variances) {
        k.var_delta(vd.data(), q, m.t_);
        k.axpy(m.var_dt_.data() + static_cast<std::size_t>(d) * m.t_, 1.0,
               vd.data(), m.t_);
        k.axpy(m.var_tv_.data() + static_cast<std::size_t>(view.word[i]) * m.t_,
               1.0, vd.data(), m.t_);
        k.axpy(m.var_t_.data(), 1.0, vd.data(), m.t_);
      }
    }
  }
  return m;
}

MomentTable MomentTable::from_types(const TypeView& view,
                                    const TypePosterior& posterior,
                                    bool with_variances) {
  if (posterior.q.size() !=
      static_cast<std::size_t>(view.total_types()) * posterior.T) {
    throw std::invalid_argument("posterior does not cover the view");
  }
  MomentTable m;
  m.d_ = view.D;
  m.v_ = view.V;
  m.t_ = posterior.T;
  m.with_var_ = with_variances;
  m.doc_tokens_.resize(view.D);
  m.e_dt_.assign(static_cast<std::size_t>(view.D) * m.t_, 0.0);
  m.e_tv_.assign(static_cast<std::size_t>(view.V) * m.t_, 0.0);
  m.e_t_.assign(m.t_, 0.0);
  if (with_variances) {
    m.var_dt_.assign(m.e_dt_.size(), 0.0);
    m.var_tv_.assign(m.e_tv_.size(), 0.0);
    m.var_t_.assign(m.t_, 0.0);
  }

  const auto& k = kern::active();
  std::vector<double> vd(m.t_);
  for (int d = 0; d < view.D; ++d) {
    int64_t doc_total = 0;
    double* doc = m.e_dt_.data() + static_cast<std::size_t>(d) * m.t_;
    for (int64_t i = view.doc_begin(d); i < view.doc_end(d); ++i) {
      const double* q = posterior.q.data() + i * m.t_;
      const double mult = view.count[i];
      doc_total += view.count[i];
      double* wrd = m.e_tv_.data() + static_cast<std::size_t>(view.word[i]) * m.t_;
      k.axpy(doc, mult, q, m.t_);
      k.axpy(wrd, mult, q, m.t_);
      k.axpy(m.e_t_.data(), mult, q, m.t_);
      if (with_variances) {
        k.var_delta(vd.data(), q, m.t_);
        k.axpy(m.var_dt_.data() + static_cast<std::size_t>(d) * m.t_, mult,
               vd.data(), m.t_);
        k.axpy(m.var_tv_.data() + static_cast<std::size_t>(view.word[i]) * m.t_,
               mult, vd.data(), m.t_);
        k.axpy(m.var_t_.data(), mult, vd.data(), m.t_);
      }
    }
    m.doc_tokens_[d] = static_cast<int32_t>(doc_total);
    m.covered_ += doc_total;
  }
  return m;
}

void MomentTable::subtract_into(int d, int32_t v, std::span<const double> q_old,
                                double multiplicity, Excluded& out) const {
  const auto& k = kern::active();
  const std::size_t n = static_cast<std::size_t>(t_);
  out.resize(t_, with_var_);
  k.sub_scaled(out.e_dt.data(), doc_row(d).data(), multiplicity, q_old.data(), n);
  k.sub_scaled(out.e_tv.data(), word_row(v).data(), multiplicity, q_old.data(), n);
  k.sub_scaled(out.e_t.data(), e_t_.data(), multiplicity, q_old.data(), n);
  clamp_nonnegative(out.e_dt, "E[n_dt]");
  clamp_nonnegative(out.e_tv, "E[n_tv]");
  clamp_nonnegative(out.e_t, "E[n_t]");
  if (with_var_) {
    k.var_delta(out.var_t.data(), q_old.data(), n);  // reused as scratch
    k.sub_scaled(out.var_dt.data(), doc_var_row(d).data(), multiplicity,
                 out.var_t.data(), n);
    k.sub_scaled(out.var_tv.data(), word_var_row(v).data(), multiplicity,
                 out.var_t.data(), n);
    k.sub_scaled(out.var_t.data(), var_t_.data(), multiplicity,
                 out.var_t.data(), n);
    clamp_nonnegative(out.var_dt, "V[n_dt]");
    clamp_nonnegative(out.var_tv, "V[n_tv]");
    clamp_nonnegative(out.var_t, "V[n_t]");
  }
}

void MomentTable::apply_delta(int d, int32_t v, std::span<const double> q_old,
                              std::span<const double> q_new,
                              double multiplicity) {
  const auto& k = kern::active();
  const std::size_t n = static_cast<std::size_t>(t_);
  scratch_delta_.resize(n);
  k.sub_scaled(scratch_delta_.data(), q_new.data(), 1.0, q_old.data(), n);
  double* doc = e_dt_.data() + static_cast<std::size_t>(d) * t_;
  double* wrd = e_tv_.data() + static_cast<std::size_t>(v) * t_;
  k.axpy(doc, multiplicity, scratch_delta_.data(), n);
  k.axpy(wrd, multiplicity, scratch_delta_.data(), n);
  k.axpy(e_t_.data(), multiplicity, scratch_delta_.data(), n);
  if (with_var_) {
    scratch_var_.resize(n);
    k.var_delta(scratch_delta_.data(), q_new.data(), n);
    k.var_delta(scratch_var_.data(), q_old.data(), n);
    k.sub_scaled(scratch_delta_.data(), scratch_delta_.data(), 1.0,
                 scratch_var_.data(), n);
    k.axpy(var_dt_.data() + static_cast<std::size_t>(d) * t_, multiplicity,
           scratch_delta_.data(), n);
    k.axpy(var_tv_.data() + static_cast<std::size_t>(v) * t_, multiplicity,
           scratch_delta_.data(), n);
    k.axpy(var_t_.data(), multiplicity, scratch_delta_.data(), n);
  }
}

void MomentTable::exclude_token(int d, int32_t pos, int32_t v,
                                std::span<const double> q_old, Excluded& out) {
  if (pending_) {
    throw std::logic_error("exclude_token while another exclusion is open");
  }
  subtract_into(d, v, q_old, 1.0, out);
  pending_ = true;
  pending_d_ = d;
  pending_key_ = pos;
}

void MomentTable::include_token(int d, int32_t pos, int32_t v,
                                std::span<const double> q_old,
                                std::span<const double> q_new) {
  if (!pending_ || pending_d_ != d || pending_key_ != pos) {
    throw std::logic_error("include_token without a matching exclude_token");
  }
  apply_delta(d, v, q_old, q_new, 1.0);
  pending_ = false;
}

void MomentTable::exclude_type(int d, int32_t v, std::span<const double> q_old,
                               int32_t multiplicity, Excluded& out) {
  if (pending_) {
    throw std::logic_error("exclude_type while another exclusion is open");
  }
  subtract_into(d, v, q_old, multiplicity, out);
  pending_ = true;
  pending_d_ = d;
  pending_key_ = -static_cast<int64_t>(v) - 1;
}

void MomentTable::include_type(int d, int32_t v, std::span<const double> q_old,
                               std::span<const double> q_new,
                               int32_t multiplicity) {
  if (!pending_ || pending_d_ != d ||
      pending_key_ != -static_cast<int64_t>(v) - 1) {
    throw std::logic_error("include_type without a matching exclude_type");
  }
  apply_delta(d, v, q_old, q_new, multiplicity);
  pending_ = false;
}

double MomentTable::max_abs_diff(const MomentTable& other) const {
  if (d_ != other.d_ || v_ != other.v_ || t_ != other.t_) {
    throw std::invalid_argument("moment tables have different shapes");
  }
  double worst = 0.0;
  auto scan = [&worst](const std::vector<double>& a,
                       const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst = std::max(worst, std::abs(a[i] - b[i]));
    }
  };
  scan(e_dt_, other.e_dt_);
  scan(e_tv_, other.e_tv_);
  scan(e_t_, other.e_t_);
  if (with_var_ && other.with_var_) {
    scan(var_dt_, other.var_dt_);
    scan(var_tv_, other.var_tv_);
    scan(var_t_, other.var_t_);
  }
  return worst;
}

double ConservationReport::max_violation() const {
  return std::max({max_doc_violation, max_topic_violation, total_violation});
}

std::string ConservationReport::to_string() const {
  std::ostringstream ss;
  ss << "max_d |sum_t E[n_dt] - n_d| = " << max_doc_violation
     << ", max_t |sum_v E[n_tv] - E[n_t]| = " << max_topic_violation
     << ", |sum_t E[n_t] - n| = " << total_violation;
  return ss.str();
}

ConservationReport verify_conservation(const MomentTable& m) {
  const auto& k = kern::active();
  ConservationReport report;
  for (int d = 0; d < m.D(); ++d) {
    const double violation =
        std::abs(k.sum(m.doc_row(d).data(), m.T()) - m.doc_tokens(d));
    report.max_doc_violation = std::max(report.max_doc_violation, violation);
  }
  std::vector<double> col(m.T(), 0.0);
  for (int v = 0; v < m.V(); ++v) {
    k.axpy(col.data(), 1.0, m.word_row(v).data(), m.T());
  }
  for (int t = 0; t < m.T(); ++t) {
    report.max_topic_violation = std::max(
        report.max_topic_violation, std::abs(col[t] - m.topic_totals()[t]));
  }
  report.total_violation = std::abs(
      k.sum(m.topic_totals().data(), m.T()) - static_cast<double>(m.covered_tokens()));
  return report;
}

}  // namespace alphalda
