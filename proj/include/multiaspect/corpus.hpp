#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "multiaspect/schema.hpp"
#include "multiaspect/text.hpp"

namespace multiaspect {

inline constexpr int kAmbiguous = -1;  // "ambiguous/irrelevant" sentence label
inline constexpr int kUnlabeled = -2;

/// Bijective word <-> index map with per-word document frequencies.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Words must be distinct; `doc_freq` may be empty (all zero).
  Vocabulary(std::vector<std::string> words, std::vector<int> doc_freq = {});

  int size() const { return static_cast<int>(words_.size()); }
  std::optional<int> find(const std::string& word) const;
  const std::string& word(int index) const { return words_.at(index); }
  int doc_freq(int index) const { return doc_freq_.at(index); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<int>& doc_freqs() const { return doc_freq_; }

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && doc_freq_ == other.doc_freq_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<int> doc_freq_;
  std::unordered_map<std::string, int> index_;
};

struct Sentence {
  std::vector<int> tokens;  // vocabulary indices; out-of-vocabulary words dropped
  std::string raw_text;
  std::optional<int> rating;  // level index, per-sentence-rating corpora only

  bool operator==(const Sentence&) const = default;
};

struct Review {
  std::string review_id;
  std::string item_id;
  std::string user_id;
  std::vector<Sentence> sentences;
  std::vector<std::optional<int>> ratings;  // level index per aspect

  int num_sentences() const { return static_cast<int>(sentences.size()); }
  bool fully_rated() const;

  bool operator==(const Review&) const = default;
};

struct LabeledSentence {
  std::string review_id;
  int sentence_index = 0;
  int label = kAmbiguous;  // aspect index or kAmbiguous

  bool operator==(const LabeledSentence&) const = default;
};

/// A review as read from disk, before vocabulary lookup.
struct RawReview {
  std::string review_id;
  std::string item_id;
  std::string user_id;
  std::vector<RawSentence> sentences;
  std::vector<std::optional<int>> ratings;
  std::vector<std::optional<int>> sentence_ratings;  // empty unless per-sentence
};

struct Corpus {
  AspectSchema schema;
  std::vector<Review> reviews;
  Vocabulary vocabulary;
  std::vector<LabeledSentence> labels;

  int num_aspects() const { return schema.num_aspects(); }
  std::optional<int> review_index(const std::string& review_id) const;

  /// labels[r][s] is an aspect index, kAmbiguous, or kUnlabeled.
  std::vector<std::vector<int>> label_table() const;
};

/// Words with document frequency >= min_df, in lexicographic order.
Vocabulary build_vocabulary(std::span<const RawReview> reviews, int min_df);

/// Parse a JSON-lines review file. Errors carry the 1-based line number.
std::vector<RawReview> read_raw_reviews(const std::string& path, const AspectSchema& schema);

/// Map words to vocabulary indices; unknown words are skipped.
Corpus index_corpus(const AspectSchema& schema, std::span<const RawReview> raw,
                    Vocabulary vocabulary);

struct LoadOptions {
  int min_df = 5;
  // Reuse an existing vocabulary (e.g. a trained model's) instead of building one.
  std::optional<Vocabulary> vocabulary;
};

Corpus load_corpus(const std::string& path, const AspectSchema& schema,
                   const LoadOptions& options = {});

/// Writes one JSON object per review with a `sentences` list. A non-empty
/// `config_hash` is stored as an extra field of every line.
void save_corpus(const Corpus& corpus, const std::string& path,
                 const std::string& config_hash = {});

/// TSV: review_id, sentence_index, aspect name or "ambiguous".
std::vector<LabeledSentence> load_labels(const std::string& path, const Corpus& corpus);
/// A non-empty `config_hash` is written as a leading `#` comment line.
void save_labels(const std::vector<LabeledSentence>& labels, const AspectSchema& schema,
                 const std::string& path, const std::string& config_hash = {});

/// Review-level random partition; labels follow their reviews.
std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t rng_seed);

/// Keep the reviews at `indices` (and their labels).
Corpus subset(const Corpus& corpus, std::span<const int> indices);

/// Per-aspect rating level indices that index φ for sentence `s` of `review`.
/// Per-sentence corpora repeat the sentence's own rating for every aspect.
std::vector<std::optional<int>> sentence_ratings(const AspectSchema& schema,
                                                 const Review& review, int s);

}  // namespace multiaspect
