#include "multiaspect/learning.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

void TrainConfig::validate() const {
  if (!(reg_weight > 0.0)) throw UsageError("reg_weight must be positive");
  if (n_restarts < 1) throw UsageError("n_restarts must be at least 1");
  if (max_outer_iters < 1) throw UsageError("max_outer_iters must be at least 1");
  if (max_mstep_iters < 0) throw UsageError("max_mstep_iters must be non-negative");
  if (!(grad_tol >= 0.0)) throw UsageError("grad_tol must be non-negative");
  if (!(initial_step > 0.0)) throw UsageError("initial_step must be positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0)) throw UsageError("step_shrink must be in (0, 1)");
  if (!(step_grow >= 1.0)) throw UsageError("step_grow must be >= 1");
  if (!(armijo >= 0.0 && armijo < 1.0)) throw UsageError("armijo must be in [0, 1)");
  if (!(init_noise >= 0.0)) throw UsageError("init_noise must be non-negative");
  if (relax < 0) throw UsageError("relax must be non-negative");
  if (!(supervised_reg_weight > 0.0)) throw UsageError("supervised_reg_weight must be positive");
  if (supervised_epochs < 1) throw UsageError("supervised_epochs must be at least 1");
  if (threads < 1) throw UsageError("threads must be at least 1");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"reg_weight", c.reg_weight},
          {"n_restarts", c.n_restarts},
          {"max_outer_iters", c.max_outer_iters},
          {"max_mstep_iters", c.max_mstep_iters},
          {"grad_tol", c.grad_tol},
          {"initial_step", c.initial_step},
          {"step_shrink", c.step_shrink},
          {"step_grow", c.step_grow},
          {"armijo", c.armijo},
          {"init_noise", c.init_noise},
          {"diversity", c.diversity},
          {"relax", c.relax},
          {"supervised_epochs", c.supervised_epochs},
          {"supervised_reg_weight", c.supervised_reg_weight},
          {"seed", c.seed}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  try {
    c.reg_weight = j.value("reg_weight", c.reg_weight);
    c.n_restarts = j.value("n_restarts", c.n_restarts);
    c.max_outer_iters = j.value("max_outer_iters", c.max_outer_iters);
    c.max_mstep_iters = j.value("max_mstep_iters", c.max_mstep_iters);
    c.grad_tol = j.value("grad_tol", c.grad_tol);
    c.initial_step = j.value("initial_step", c.initial_step);
    c.step_shrink = j.value("step_shrink", c.step_shrink);
    c.step_grow = j.value("step_grow", c.step_grow);
    c.armijo = j.value("armijo", c.armijo);
    c.init_noise = j.value("init_noise", c.init_noise);
    c.diversity = j.value("diversity", c.diversity);
    c.relax = j.value("relax", c.relax);
    c.supervised_epochs = j.value("supervised_epochs", c.supervised_epochs);
    c.supervised_reg_weight = j.value("supervised_reg_weight", c.supervised_reg_weight);
    c.threads = j.value("threads", c.threads);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("training config: {}", e.what()));
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Training data

namespace {

bool review_usable(const AspectSchema& schema, const Review& review) {
  for (int s = 0; s < review.num_sentences(); ++s) {
    if (review.sentences[s].tokens.empty()) continue;
    const auto ratings = sentence_ratings(schema, review, s);
    for (const auto& r : ratings)
      if (!r) return false;
  }
  return true;
}

}  // namespace

std::vector<int> fully_rated_reviews(const Corpus& corpus) {
  std::vector<int> out;
  for (int r = 0; r < static_cast<int>(corpus.reviews.size()); ++r)
    if (review_usable(corpus.schema, corpus.reviews[r])) out.push_back(r);
  return out;
}

TrainingData make_training_data(const Corpus& corpus, std::span<const int> review_indices) {
  const auto& schema = corpus.schema;
  TrainingData data;
  data.num_aspects = schema.num_aspects();
  data.vocab_size = corpus.vocabulary.size();
  for (int k = 0; k < data.num_aspects; ++k) data.levels.push_back(schema.num_levels(k));
  data.sentence_begin.push_back(0);
  data.review_begin.push_back(0);
  for (const int r : review_indices) {
    const auto& review = corpus.reviews.at(r);
    for (int s = 0; s < review.num_sentences(); ++s) {
      const auto& sentence = review.sentences[s];
      const auto ratings = sentence_ratings(schema, review, s);
      for (int k = 0; k < data.num_aspects; ++k) {
        if (!ratings[k] && !sentence.tokens.empty())
          throw MissingRating(fmt::format("review '{}' lacks a rating for '{}'",
                                          review.review_id, schema.aspects[k]));
        data.sentence_rating.push_back(ratings[k].value_or(0));
      }
      data.tokens.insert(data.tokens.end(), sentence.tokens.begin(), sentence.tokens.end());
      data.sentence_begin.push_back(data.tokens.size());
    }
    data.review_begin.push_back(data.num_sentences());
    data.review_index.push_back(r);
  }
  data.total_tokens = data.tokens.size();
  return data;
}

TrainingData make_training_data(const Corpus& corpus) {
  const auto indices = fully_rated_reviews(corpus);
  return make_training_data(corpus, indices);
}

AssignmentState AssignmentState::unassigned(const TrainingData& data) {
  AssignmentState state;
  state.labels.assign(data.num_sentences(), -1);
  state.observed.assign(data.num_sentences(), 0);
  return state;
}

AssignmentState observed_state(const Corpus& corpus, const TrainingData& data) {
  auto state = AssignmentState::unassigned(data);
  const auto table = corpus.label_table();
  const int K = corpus.num_aspects();
  for (int i = 0; i < data.num_reviews(); ++i) {
    const auto& row = table[data.review_index[i]];
    for (int s = data.review_begin[i]; s < data.review_begin[i + 1]; ++s) {
      const int label = row[s - data.review_begin[i]];
      if (label >= K) throw DataError(fmt::format("label refers to unknown aspect {}", label));
      if (label >= 0) {
        state.labels[s] = label;
        state.observed[s] = 1;
      }
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Objective and gradient

void sentence_scores(const ModelParams& params, const TrainingData& data, int s,
                     std::span<double> out) {
  const auto tokens = data.sentence_tokens(s);
  const auto ratings = data.ratings_of(s);
  for (int k = 0; k < data.num_aspects; ++k) {
    const double* theta = params.theta_data().data() + static_cast<std::size_t>(k) * data.vocab_size;
    const double* phi = params.phi_data().data() + params.phi_offset(k, ratings[k]);
    double sum = 0.0;
    for (const int w : tokens) sum += theta[w] + phi[w];
    out[k] = sum;
  }
}

namespace {

bool included(std::span<const char> mask, int s) { return mask.empty() || mask[s] != 0; }

double log_sum_exp(std::span<const double> c) {
  const double top = *std::max_element(c.begin(), c.end());
  double z = 0.0;
  for (const double x : c) z += std::exp(x - top);
  return top + std::log(z);
}

}  // namespace

Objective objective(const ModelParams& params, const TrainingData& data,
                    const AssignmentState& state, double reg_weight, std::span<const char> mask) {
  Objective out;
  std::vector<double> c(data.num_aspects);
  std::size_t n_tokens = 0;
  for (int s = 0; s < data.num_sentences(); ++s) {
    const int t = state.labels[s];
    if (t < 0 || !included(mask, s)) continue;
    sentence_scores(params, data, s, c);
    out.log_likelihood += c[t] - log_sum_exp(c);
    n_tokens += data.sentence_tokens(s).size();
  }
  out.normalizer = std::max<std::size_t>(n_tokens, 1);
  out.penalty = params.squared_norm();
  out.value = out.log_likelihood / static_cast<double>(out.normalizer) - reg_weight * out.penalty;
  return out;
}

ModelParams objective_gradient(const ModelParams& params, const TrainingData& data,
                               const AssignmentState& state, double reg_weight,
                               std::span<const char> mask) {
  ModelParams grad(params.levels(), params.vocab_size());
  const int K = data.num_aspects;
  std::vector<double> c(K);
  std::size_t n_tokens = 0;
  auto& g_theta = grad.theta_data();
  auto& g_phi = grad.phi_data();
  for (int s = 0; s < data.num_sentences(); ++s) {
    const int t = state.labels[s];
    if (t < 0 || !included(mask, s)) continue;
    const auto tokens = data.sentence_tokens(s);
    n_tokens += tokens.size();
    if (tokens.empty()) continue;
    sentence_scores(params, data, s, c);
    const double lse = log_sum_exp(c);
    const auto ratings = data.ratings_of(s);
    for (int k = 0; k < K; ++k) {
      const double coef = (k == t ? 1.0 : 0.0) - std::exp(c[k] - lse);
      double* gt = g_theta.data() + static_cast<std::size_t>(k) * data.vocab_size;
      double* gp = g_phi.data() + grad.phi_offset(k, ratings[k]);
      for (const int w : tokens) {
        gt[w] += coef;
        gp[w] += coef;
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(n_tokens, 1));
  const auto& theta = params.theta_data();
  const auto& phi = params.phi_data();
  for (std::size_t i = 0; i < g_theta.size(); ++i)
    g_theta[i] = g_theta[i] * inv_n - 2.0 * reg_weight * theta[i];
  for (std::size_t i = 0; i < g_phi.size(); ++i)
    g_phi[i] = g_phi[i] * inv_n - 2.0 * reg_weight * phi[i];
  return grad;
}

// ---------------------------------------------------------------------------
// Coordinate ascent

ModelParams init_params(const AspectSchema& schema, const Vocabulary& vocabulary,
                        std::mt19937_64& rng, double noise, std::vector<std::string>* warnings) {
  ModelParams params(schema, vocabulary.size());
  std::uniform_real_distribution<double> uniform(-noise, noise);
  if (noise > 0.0) {
    for (double& x : params.theta_data()) x = uniform(rng);
    for (double& x : params.phi_data()) x = uniform(rng);
  }
  for (int k = 0; k < schema.num_aspects(); ++k) {
    for (const auto& seed : schema.seed_words[k]) {
      if (const auto w = vocabulary.find(seed)) {
        params.theta(k, *w) = 1.0;
      } else if (warnings) {
        warnings->push_back(fmt::format("seed word '{}' of aspect '{}' is not in the vocabulary",
                                        seed, schema.aspects[k]));
      }
    }
  }
  normalize_phi_in_place(params);
  return params;
}

int e_step(const ModelParams& params, const TrainingData& data, AssignmentState& state,
           const SegmentOptions& options) {
  const int K = data.num_aspects;
  int changed = 0;
  std::vector<int> fixed;
  for (int r = 0; r < data.num_reviews(); ++r) {
    const int begin = data.review_begin[r];
    const int n = data.review_begin[r + 1] - begin;
    bool any_free = false;
    for (int s = begin; s < begin + n; ++s) any_free = any_free || !state.observed[s];
    if (!any_free) continue;

    Matrix compat(n, K);
    fixed.assign(n, -1);
    for (int i = 0; i < n; ++i) {
      sentence_scores(params, data, begin + i, compat.row(i));
      if (state.observed[begin + i]) fixed[i] = state.labels[begin + i];
    }
    const auto labels = segment_compat(compat, options, fixed);
    for (int i = 0; i < n; ++i) {
      if (state.observed[begin + i]) continue;
      if (state.labels[begin + i] != labels[i]) ++changed;
      state.labels[begin + i] = labels[i];
    }
  }
  return changed;
}

namespace {

// Remove the component of the φ gradient that would change Σ_v φ_kvw.
void project_onto_gauge(ModelParams& grad) {
  const int V = grad.vocab_size();
  for (int k = 0; k < grad.num_aspects(); ++k) {
    const int L = grad.num_levels(k);
    for (int w = 0; w < V; ++w) {
      double mean = 0.0;
      for (int v = 0; v < L; ++v) mean += grad.phi(k, v, w);
      mean /= L;
      for (int v = 0; v < L; ++v) grad.phi(k, v, w) -= mean;
    }
  }
}

double inf_norm_and_sq(const ModelParams& g, double& squared) {
  double top = 0.0;
  squared = 0.0;
  for (const double x : g.theta_data()) {
    top = std::max(top, std::abs(x));
    squared += x * x;
  }
  for (const double x : g.phi_data()) {
    top = std::max(top, std::abs(x));
    squared += x * x;
  }
  return top;
}

ModelParams add_scaled(const ModelParams& base, const ModelParams& dir, double step) {
  ModelParams out = base;
  auto& t = out.theta_data();
  auto& p = out.phi_data();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += step * dir.theta_data()[i];
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += step * dir.phi_data()[i];
  return out;
}

}  // namespace

ModelParams m_step(ModelParams params, const TrainingData& data, const AssignmentState& state,
                   const TrainConfig& config, MStepTrace* trace, std::span<const char> mask) {
  normalize_phi_in_place(params);
  double current = objective(params, data, state, config.reg_weight, mask).value;
  if (!std::isfinite(current))
    throw NumericalError("m_step: objective is not finite at the starting point");
  if (trace) trace->objectives.push_back(current);

  double step = config.initial_step;
  int it = 0;
  double grad_norm = 0.0;
  for (; it < config.max_mstep_iters; ++it) {
    auto grad = objective_gradient(params, data, state, config.reg_weight, mask);
    project_onto_gauge(grad);
    double grad_sq = 0.0;
    grad_norm = inf_norm_and_sq(grad, grad_sq);
    if (!std::isfinite(grad_norm)) throw NumericalError("m_step: gradient is not finite");
    if (grad_norm < config.grad_tol) break;

    bool accepted = false;
    while (step > 1e-14) {
      auto candidate = add_scaled(params, grad, step);
      const double value = objective(candidate, data, state, config.reg_weight, mask).value;
      if (std::isfinite(value) && value >= current + config.armijo * step * grad_sq &&
          value > current) {
        params = std::move(candidate);
        current = value;
        accepted = true;
        step *= config.step_grow;
        break;
      }
      step *= config.step_shrink;
    }
    if (!accepted) break;
    if (trace) trace->objectives.push_back(current);
  }
  normalize_phi_in_place(params);
  if (!params.all_finite()) throw NumericalError("m_step: parameters became non-finite");
  if (trace) {
    trace->iterations = it;
    trace->final_grad_norm = grad_norm;
  }
  return params;
}

namespace {

struct RunResult {
  ModelParams params;
  AssignmentState state;
  double objective = -std::numeric_limits<double>::infinity();
  int outer_iterations = 0;
  std::vector<LogRow> log;
};

RunResult coordinate_ascent(ModelParams params, AssignmentState state, const TrainingData& data,
                            const TrainConfig& config, int restart) {
  RunResult run;
  const auto options = config.segment_options();
  for (int outer = 0; outer < config.max_outer_iters; ++outer) {
    const int changed = e_step(params, data, state, options);
    if (outer > 0 && changed == 0) break;
    MStepTrace trace;
    params = m_step(std::move(params), data, state, config, &trace);
    for (std::size_t i = 0; i < trace.objectives.size(); ++i)
      run.log.push_back({restart, outer, static_cast<int>(i), trace.objectives[i], changed});
    ++run.outer_iterations;
  }
  run.objective = objective(params, data, state, config.reg_weight).value;
  run.params = std::move(params);
  run.state = std::move(state);
  return run;
}

std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

template <typename Fn>
void run_parallel(int count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

TrainResult select_best(std::vector<RunResult> runs, TrainingData data,
                        std::vector<std::string> warnings) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(runs.size()); ++i)
    if (runs[i].objective > runs[best].objective) best = i;
  TrainResult result;
  for (auto& run : runs) result.log.insert(result.log.end(), run.log.begin(), run.log.end());
  result.params = std::move(runs[best].params);
  result.state = std::move(runs[best].state);
  result.objective = runs[best].objective;
  result.outer_iterations = runs[best].outer_iterations;
  result.best_restart = best;
  result.data = std::move(data);
  result.warnings = std::move(warnings);
  return result;
}

}  // namespace

TrainResult train_unsupervised(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  auto data = make_training_data(corpus);
  if (data.num_reviews() == 0) throw DataError("no fully rated reviews to train on");

  std::vector<std::string> warnings;
  {
    auto rng = restart_rng(config.seed, 0);
    init_params(corpus.schema, corpus.vocabulary, rng, config.init_noise, &warnings);
  }
  std::vector<RunResult> runs(config.n_restarts);
  run_parallel(config.n_restarts, config.threads, [&](int r) {
    auto rng = restart_rng(config.seed, r);
    auto params = init_params(corpus.schema, corpus.vocabulary, rng, config.init_noise);
    runs[r] = coordinate_ascent(std::move(params), AssignmentState::unassigned(data), data,
                                config, r);
  });
  return select_best(std::move(runs), std::move(data), std::move(warnings));
}

TrainResult train_semisupervised(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  auto data = make_training_data(corpus);
  if (data.num_reviews() == 0) throw DataError("no fully rated reviews to train on");
  auto state = observed_state(corpus, data);
  const bool any_observed =
      std::any_of(state.observed.begin(), state.observed.end(), [](char c) { return c != 0; });
  if (!any_observed) return train_unsupervised(corpus, config);

  std::vector<std::string> warnings;
  auto rng = restart_rng(config.seed, 0);
  auto params = init_params(corpus.schema, corpus.vocabulary, rng, config.init_noise, &warnings);

  // Fit the labeled sentences first; the objective is strictly concave
  // there, so further restarts would reach the same start point.
  MStepTrace trace;
  params = m_step(std::move(params), data, state, config, &trace, state.observed);
  std::vector<LogRow> init_log;
  for (std::size_t i = 0; i < trace.objectives.size(); ++i)
    init_log.push_back({0, -1, static_cast<int>(i), trace.objectives[i], 0});

  std::vector<RunResult> runs(1);
  runs[0] = coordinate_ascent(std::move(params), std::move(state), data, config, 0);
  runs[0].log.insert(runs[0].log.begin(), init_log.begin(), init_log.end());
  return select_best(std::move(runs), std::move(data), std::move(warnings));
}

std::vector<int> loss_augmented_labels(const Matrix& compat, std::span<const int> truth,
                                       const SegmentOptions& options) {
  const int n = compat.rows();
  if (static_cast<int>(truth.size()) != n)
    throw std::invalid_argument("loss_augmented_labels: truth size mismatch");
  Matrix augmented = compat;
  const double unit = n > 0 ? 1.0 / n : 0.0;
  for (int s = 0; s < n; ++s) {
    if (truth[s] < 0) continue;
    for (int k = 0; k < compat.cols(); ++k)
      if (k != truth[s]) augmented(s, k) += unit;
  }
  return segment_compat(augmented, options);
}

void write_training_log(const std::vector<LogRow>& log, const std::string& path,
                        const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  out << "restart,outer,step,objective,label_changes\n";
  for (const auto& row : log)
    out << fmt::format("{},{},{},{:.17g},{}\n", row.restart, row.outer, row.step, row.objective,
                       row.label_changes);
}

}  // namespace multiaspect
