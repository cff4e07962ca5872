#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "multiaspect/assignment.hpp"
#include "multiaspect/corpus.hpp"
#include "multiaspect/model.hpp"

namespace multiaspect {

struct TrainConfig {
  double reg_weight = 1e-3;  // λ, against a log-likelihood averaged per word occurrence
  int n_restarts = 64;
  int max_outer_iters = 50;
  int max_mstep_iters = 100;
  double grad_tol = 1e-6;
  // Backtracking line search.
  double initial_step = 1.0;
  double step_shrink = 0.5;
  double step_grow = 1.5;
  double armijo = 1e-4;
  double init_noise = 0.05;
  bool diversity = true;
  int relax = 0;
  int supervised_epochs = 60;
  // λ of the structured hinge, whose loss is per review rather than per word.
  double supervised_reg_weight = 10.0;
  int threads = 1;
  std::uint64_t seed = 0;

  void validate() const;
  SegmentOptions segment_options() const { return {diversity, relax}; }
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig defaults = {});

/// Flattened view of the reviews used for training: sentences in review
/// order, their tokens, and the rating level that indexes φ for every aspect.
struct TrainingData {
  int num_aspects = 0;
  int vocab_size = 0;
  std::vector<int> levels;
  std::vector<int> tokens;
  std::vector<std::size_t> sentence_begin;  // size S + 1
  std::vector<int> sentence_rating;         // S × K
  std::vector<int> review_begin;            // size R + 1, sentence offsets
  std::vector<int> review_index;            // index into the source corpus
  std::size_t total_tokens = 0;

  int num_sentences() const { return static_cast<int>(sentence_begin.size()) - 1; }
  int num_reviews() const { return static_cast<int>(review_begin.size()) - 1; }
  std::span<const int> sentence_tokens(int s) const {
    return {tokens.data() + sentence_begin[s], sentence_begin[s + 1] - sentence_begin[s]};
  }
  std::span<const int> ratings_of(int s) const {
    return {sentence_rating.data() + static_cast<std::size_t>(s) * num_aspects,
            static_cast<std::size_t>(num_aspects)};
  }
};

/// Reviews whose every aspect rating (and sentence rating, if used) is present.
std::vector<int> fully_rated_reviews(const Corpus& corpus);

/// Throws MissingRating if a selected review lacks a rating.
TrainingData make_training_data(const Corpus& corpus, std::span<const int> review_indices);
TrainingData make_training_data(const Corpus& corpus);  // all fully rated reviews

/// Current aspect label of every training sentence, and which labels are
/// observed (clamped).
struct AssignmentState {
  std::vector<int> labels;
  std::vector<char> observed;

  static AssignmentState unassigned(const TrainingData& data);
};

/// Observed groundtruth labels of the corpus, placed into a state for `data`.
/// Ambiguous labels are not observed. Throws DataError on unknown aspects.
AssignmentState observed_state(const Corpus& corpus, const TrainingData& data);

/// c_sk for one training sentence.
void sentence_scores(const ModelParams& params, const TrainingData& data, int s,
                     std::span<double> out);

struct Objective {
  double log_likelihood = 0.0;  // Σ log p(t_s | s, v), unnormalized
  double penalty = 0.0;         // Ω = ||θ||² + ||φ||²
  double value = 0.0;           // log_likelihood / N - λ Ω
  std::size_t normalizer = 1;   // N, word occurrences of the included sentences
};

/// Regularized objective over labeled sentences; `mask` (if nonempty)
/// restricts to sentences with mask[s] != 0.
Objective objective(const ModelParams& params, const TrainingData& data,
                    const AssignmentState& state, double reg_weight,
                    std::span<const char> mask = {});

/// Analytic gradient of objective().value with respect to (θ, φ).
ModelParams objective_gradient(const ModelParams& params, const TrainingData& data,
                               const AssignmentState& state, double reg_weight,
                               std::span<const char> mask = {});

/// Random init with θ_{k,seed} = 1 for every resolvable seed word of aspect k,
/// other entries uniform in [-noise, noise], then normalize_phi.
ModelParams init_params(const AspectSchema& schema, const Vocabulary& vocabulary,
                        std::mt19937_64& rng, double noise = 0.05,
                        std::vector<std::string>* warnings = nullptr);

/// Relabel all unobserved sentences; returns how many labels changed.
int e_step(const ModelParams& params, const TrainingData& data, AssignmentState& state,
           const SegmentOptions& options);

struct MStepTrace {
  std::vector<double> objectives;  // initial value, then every accepted step
  int iterations = 0;
  double final_grad_norm = 0.0;
};

/// Projected gradient ascent with backtracking on objective(), keeping
/// Σ_v φ_kvw fixed. Params are normalized on entry and exit.
ModelParams m_step(ModelParams params, const TrainingData& data, const AssignmentState& state,
                   const TrainConfig& config, MStepTrace* trace = nullptr,
                   std::span<const char> mask = {});

struct LogRow {
  int restart = 0;
  int outer = 0;
  int step = 0;
  double objective = 0.0;
  int label_changes = 0;
};

struct TrainResult {
  ModelParams params;
  AssignmentState state;
  TrainingData data;
  double objective = 0.0;
  int best_restart = 0;
  int outer_iterations = 0;  // m-steps run by the selected restart
  std::vector<LogRow> log;
  std::vector<std::string> warnings;
};

TrainResult train_unsupervised(const Corpus& corpus, const TrainConfig& config);

/// Uses corpus.labels as clamped observations. Without labels this is
/// train_unsupervised.
TrainResult train_semisupervised(const Corpus& corpus, const TrainConfig& config);

/// Structured hinge training on the labeled reviews of `corpus` only.
TrainResult train_supervised(const Corpus& corpus, const TrainConfig& config);

/// Loss-augmented cover: argmax over diversity-feasible labelings of
/// Σ_s c_{s,y_s} + (1/n) [y_s != truth_s]. Ambiguous truths add no loss.
std::vector<int> loss_augmented_labels(const Matrix& compat, std::span<const int> truth,
                                       const SegmentOptions& options);

struct HingeValue {
  double hinge = 0.0;  // mean structured hinge over reviews
  double loss = 0.0;   // mean Δ_0/1 of the plain prediction
};

/// Evaluated on the labeled reviews of `corpus`, with the same inference as
/// training and prediction.
HingeValue structured_hinge(const ModelParams& params, const Corpus& corpus,
                            const SegmentOptions& options);

void write_training_log(const std::vector<LogRow>& log, const std::string& path,
                        const std::string& config_hash = {});

}  // namespace multiaspect
