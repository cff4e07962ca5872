#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "multiaspect/corpus.hpp"
#include "multiaspect/schema.hpp"

namespace multiaspect {

/// Aspect weights θ[k][w] and sentiment weights φ[k][v][w], stored densely
/// with w fastest. φ blocks of consecutive aspects are contiguous.
class ModelParams {
 public:
  ModelParams() = default;
  ModelParams(std::vector<int> levels_per_aspect, int vocab_size);
  ModelParams(const AspectSchema& schema, int vocab_size);

  int num_aspects() const { return static_cast<int>(levels_.size()); }
  int vocab_size() const { return vocab_size_; }
  int num_levels(int k) const { return levels_[k]; }
  const std::vector<int>& levels() const { return levels_; }

  double& theta(int k, int w) { return theta_[static_cast<std::size_t>(k) * vocab_size_ + w]; }
  double theta(int k, int w) const {
    return theta_[static_cast<std::size_t>(k) * vocab_size_ + w];
  }
  double& phi(int k, int v, int w) { return phi_[phi_offset(k, v) + w]; }
  double phi(int k, int v, int w) const { return phi_[phi_offset(k, v) + w]; }

  std::size_t phi_offset(int k, int v) const {
    return phi_start_[k] + static_cast<std::size_t>(v) * vocab_size_;
  }

  std::vector<double>& theta_data() { return theta_; }
  const std::vector<double>& theta_data() const { return theta_; }
  std::vector<double>& phi_data() { return phi_; }
  const std::vector<double>& phi_data() const { return phi_; }

  /// ||θ||² + ||φ||²
  double squared_norm() const;
  bool all_finite() const;

  bool operator==(const ModelParams& other) const {
    return levels_ == other.levels_ && vocab_size_ == other.vocab_size_ &&
           theta_ == other.theta_ && phi_ == other.phi_;
  }

 private:
  std::vector<int> levels_;
  int vocab_size_ = 0;
  std::vector<std::size_t> phi_start_;
  std::vector<double> theta_;
  std::vector<double> phi_;
};

/// c_k = Σ_{w∈s} θ_kw + φ_{k,v_k,w} for every aspect k.
/// Throws MissingRating when a rating is absent for a non-empty sentence.
std::vector<double> compatibility(const ModelParams& params, std::span<const int> tokens,
                                  std::span<const std::optional<int>> ratings);

/// Compatibility of sentence `s` of `review`, honoring per-sentence ratings.
std::vector<double> compatibility(const ModelParams& params, const AspectSchema& schema,
                                  const Review& review, int s);

/// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> scores);

std::vector<double> sentence_aspect_probs(const ModelParams& params,
                                          std::span<const int> tokens,
                                          std::span<const std::optional<int>> ratings);
std::vector<double> sentence_aspect_probs(const ModelParams& params,
                                          const AspectSchema& schema, const Review& review,
                                          int s);

/// Σ over reviews and sentences of log p(assigned aspect | s, v).
/// Sentences assigned a negative label are skipped if empty, an error otherwise.
double corpus_log_likelihood(const ModelParams& params, const Corpus& corpus,
                             const std::vector<std::vector<int>>& assignments);

/// Move every (k, w) onto Σ_v φ_kvw = 1 by shifting φ_k·w uniformly and
/// compensating in θ_kw. Sentence probabilities are unchanged.
void normalize_phi_in_place(ModelParams& params);
ModelParams normalize_phi(ModelParams params);

struct WordWeight {
  std::string word;
  double weight = 0.0;
};

/// Highest-weighted words of θ_k (no rating) or φ_{k,level}, ties by word.
std::vector<WordWeight> top_words(const ModelParams& params, const Vocabulary& vocabulary,
                                  int aspect, std::optional<int> level, int n);

/// A trained segmentation model with everything needed to apply it.
struct Model {
  AspectSchema schema;
  Vocabulary vocabulary;
  ModelParams params;
};

inline constexpr int kModelFormatVersion = 1;

void save_model(const Model& model, const std::string& path,
                const std::string& config_hash = {});
/// Throws DataError on a malformed or truncated file, a version mismatch, or
/// (when `expected` is given) dimensions that disagree with that schema.
Model load_model(const std::string& path, const AspectSchema* expected = nullptr);

}  // namespace multiaspect
