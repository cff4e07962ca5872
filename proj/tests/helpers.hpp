#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "multiaspect/corpus.hpp"
#include "multiaspect/model.hpp"
#include "multiaspect/schema.hpp"

namespace testing {

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("multiaspect_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return path.string();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline multiaspect::ModelParams random_params(const std::vector<int>& levels, int V,
                                              std::mt19937_64& rng, double scale = 1.0) {
  multiaspect::ModelParams p(levels, V);
  std::normal_distribution<double> g(0.0, scale);
  for (double& x : p.theta_data()) x = g(rng);
  for (double& x : p.phi_data()) x = g(rng);
  return p;
}

// Random fully rated corpus over a numbered vocabulary.
inline multiaspect::Corpus random_corpus(const multiaspect::AspectSchema& schema, int V,
                                         int reviews, int min_sentences, int max_sentences,
                                         std::mt19937_64& rng) {
  std::vector<std::string> words;
  for (int w = 0; w < V; ++w) words.push_back("w" + std::to_string(1000 + w));
  multiaspect::Corpus corpus;
  corpus.schema = schema;
  corpus.vocabulary = multiaspect::Vocabulary(words);
  std::uniform_int_distribution<int> n_sent(min_sentences, max_sentences);
  std::uniform_int_distribution<int> n_words(1, 6);
  std::uniform_int_distribution<int> word(0, V - 1);
  for (int r = 0; r < reviews; ++r) {
    multiaspect::Review review;
    review.review_id = "r" + std::to_string(r);
    for (int k = 0; k < schema.num_aspects(); ++k)
      review.ratings.push_back(std::uniform_int_distribution<int>(0, schema.num_levels(k) - 1)(rng));
    const int n = n_sent(rng);
    for (int s = 0; s < n; ++s) {
      multiaspect::Sentence sentence;
      const int len = n_words(rng);
      for (int i = 0; i < len; ++i) sentence.tokens.push_back(word(rng));
      if (schema.per_sentence_ratings) sentence.rating = review.ratings[0];
      review.sentences.push_back(sentence);
    }
    corpus.reviews.push_back(review);
  }
  return corpus;
}

}  // namespace testing
