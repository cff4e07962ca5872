#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "multiaspect/corpus.hpp"
#include "multiaspect/model.hpp"

namespace multiaspect {

/// Generating parameters θ*, φ* over a synthetic vocabulary. Entries may be
/// -infinity to exclude a word from an aspect's support.
struct PlantedModel {
  Vocabulary vocabulary;
  ModelParams params;
  std::vector<int> content_words;    // role tags for lexicon recovery checks
  std::vector<int> sentiment_words;
};

struct PlantedSpec {
  int content_words = 20;    // per aspect; the first is the aspect's seed word
  int sentiment_words = 4;   // per aspect and rating level
  int background_words = 100;
  double content_weight = 3.0;
  double sentiment_weight = 3.0;
  // When set, an aspect's sentences use only its own content and sentiment
  // words: everything else is -infinity.
  bool exclusive_support = false;
};

/// Words are named "<aspect>" (seed), "<aspect>_n<i>" (content),
/// "<aspect>_a<level>_<i>" (sentiment) and "bg<i>" (background), and the
/// vocabulary is sorted lexicographically.
PlantedModel make_planted_model(const AspectSchema& schema, const PlantedSpec& spec);

/// Planted model from a hand-written lexicon:
/// {"content_weight": x, "sentiment_weight": y, "background": [...],
///  "aspects": {"<name>": {"content": [...], "sentiment": {"<level>": [...]}}}}
PlantedModel planted_from_lexicon(const AspectSchema& schema, const nlohmann::json& lexicon);

struct SyntheticOptions {
  int min_sentences = 3;
  int max_sentences = 8;
  int min_words = 4;
  int max_words = 10;
  // Probability that an aspect rating copies the review's base rating
  // instead of being drawn independently. 1.0 makes all ratings equal.
  double rating_correlation = 0.5;
  // Reviews with at least K sentences discuss every aspect at least once.
  bool cover_all_aspects = true;
};

struct SyntheticCorpus {
  Corpus corpus;
  std::vector<std::vector<int>> true_labels;  // planted aspect per sentence
};

/// Draw reviews from the planted model: ratings first, then for every
/// sentence an aspect k and words w with probability ∝ exp(θ*_kw + φ*_{k,v_k,w}).
SyntheticCorpus generate_synthetic(const AspectSchema& schema, const PlantedModel& planted,
                                   int n_reviews, std::uint64_t rng_seed,
                                   const SyntheticOptions& options = {});

/// Labels for every sentence of the given reviews, taken from `truth`.
std::vector<LabeledSentence> planted_labels(const Corpus& corpus,
                                            const std::vector<std::vector<int>>& truth,
                                            std::span<const int> review_indices);

}  // namespace multiaspect
