#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "multiaspect/corpus.hpp"
#include "multiaspect/schema.hpp"

namespace multiaspect {

enum class Predictor { Unsegmented, Segmented, Joint };

std::string_view predictor_name(Predictor predictor);
Predictor parse_predictor(std::string_view name);

/// Rating weights γ[k][v][w].
class RatingParams {
 public:
  RatingParams() = default;
  RatingParams(std::vector<int> levels_per_aspect, int vocab_size);

  int num_aspects() const { return static_cast<int>(levels_.size()); }
  int vocab_size() const { return vocab_size_; }
  int num_levels(int k) const { return levels_[k]; }
  const std::vector<int>& levels() const { return levels_; }

  double& operator()(int k, int v, int w) { return data_[offset(k, v) + w]; }
  double operator()(int k, int v, int w) const { return data_[offset(k, v) + w]; }
  std::size_t offset(int k, int v) const {
    return start_[k] + static_cast<std::size_t>(v) * vocab_size_;
  }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<int> levels_;
  int vocab_size_ = 0;
  std::vector<std::size_t> start_;
  std::vector<double> data_;
};

/// Pairwise smoothness α_ij(v_i, v_j) between rating levels of two aspects.
/// Stored for i < j; α_ji(v, u) reads α_ij(u, v).
class PairwiseParams {
 public:
  PairwiseParams() = default;
  explicit PairwiseParams(std::vector<int> levels_per_aspect);

  int num_aspects() const { return static_cast<int>(levels_.size()); }
  double operator()(int i, int j, int vi, int vj) const;
  double& at(int i, int j, int vi, int vj);  // requires i < j
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

 private:
  std::size_t index(int i, int j, int vi, int vj) const;

  std::vector<int> levels_;
  std::vector<std::size_t> start_;  // per unordered pair
  std::vector<double> data_;
};

struct RatingPrediction {
  std::vector<int> levels;  // level index per aspect
  Predictor predictor = Predictor::Unsegmented;
};

/// Per-aspect, per-level text scores Σ γ_kvw over the words the aspect sees:
/// all words when `labels` is empty, else the words of sentences labeled k.
std::vector<std::vector<double>> text_scores(const RatingParams& gamma, const Review& review,
                                             std::span<const int> labels = {});

RatingPrediction predict_unsegmented(const RatingParams& gamma, const Review& review);
RatingPrediction predict_segmented(const RatingParams& gamma, const Review& review,
                                   std::span<const int> labels);

inline constexpr std::uint64_t kDefaultJointBudget = 10'000'000;

/// Exact argmax of Σ_k unary[k][v_k] + Σ_{i≠j} α_ij(v_i, v_j) by enumeration
/// in lexicographic order; clamped coordinates are held fixed. Throws
/// UsageError when the free configurations exceed `budget`.
std::vector<int> joint_argmax(const std::vector<std::vector<double>>& unary,
                              const PairwiseParams& alpha,
                              std::span<const std::optional<int>> clamp = {},
                              std::uint64_t budget = kDefaultJointBudget);

RatingPrediction predict_joint(const RatingParams& gamma, const PairwiseParams& alpha,
                               const Review& review, std::span<const int> labels,
                               std::span<const std::optional<int>> clamp = {},
                               std::uint64_t budget = kDefaultJointBudget);

struct RatingTrainConfig {
  double reg_weight = 0.1;
  int epochs = 30;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultJointBudget;
};

struct RatingModel {
  AspectSchema schema;
  Vocabulary vocabulary;
  Predictor predictor = Predictor::Unsegmented;
  RatingParams gamma;
  PairwiseParams alpha;  // used by the joint predictor only
};

/// Margin training with squared (scaled) rating loss on the fully rated
/// reviews of `corpus`. `labels[r]` segments review r and is required for
/// the segmented and joint predictors. Joint training clamps the overall
/// aspect to its observed value, so it carries no loss there.
RatingModel train_rating_model(const Corpus& corpus,
                               const std::vector<std::vector<int>>& labels,
                               Predictor predictor, const RatingTrainConfig& config);

/// Predict every aspect of `review`. The overall rating, when observed, is
/// kept as observed.
RatingPrediction predict(const RatingModel& model, const Review& review,
                         std::span<const int> labels);

void save_rating_model(const RatingModel& model, const std::string& path,
                       const std::string& config_hash = {});
RatingModel load_rating_model(const std::string& path);

}  // namespace multiaspect
