#include "multiaspect/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct WordRoles {
  std::vector<std::pair<std::string, int>> content;  // word, aspect
  struct Sentiment {
    std::string word;
    int aspect;
    int level;
  };
  std::vector<Sentiment> sentiment;
  std::vector<std::string> background;
};

PlantedModel build(const AspectSchema& schema, const WordRoles& roles, double content_weight,
                   double sentiment_weight, bool exclusive) {
  std::set<std::string> unique;
  for (const auto& [w, k] : roles.content) unique.insert(w);
  for (const auto& s : roles.sentiment) unique.insert(s.word);
  for (const auto& w : roles.background) unique.insert(w);

  PlantedModel planted;
  planted.vocabulary = Vocabulary(std::vector<std::string>(unique.begin(), unique.end()));
  const int V = planted.vocabulary.size();
  planted.params = ModelParams(schema, V);
  planted.content_words.assign(V, -1);
  planted.sentiment_words.assign(V, -1);

  if (exclusive) {
    std::fill(planted.params.theta_data().begin(), planted.params.theta_data().end(), kNegInf);
    std::fill(planted.params.phi_data().begin(), planted.params.phi_data().end(), kNegInf);
  }
  for (const auto& [word, k] : roles.content) {
    const int w = *planted.vocabulary.find(word);
    planted.content_words[w] = k;
    planted.params.theta(k, w) = content_weight;
    if (exclusive)
      for (int v = 0; v < schema.num_levels(k); ++v) planted.params.phi(k, v, w) = 0.0;
  }
  for (const auto& s : roles.sentiment) {
    const int w = *planted.vocabulary.find(s.word);
    planted.sentiment_words[w] = s.aspect;
    if (exclusive) planted.params.theta(s.aspect, w) = 0.0;
    planted.params.phi(s.aspect, s.level, w) = sentiment_weight;
  }
  return planted;
}

}  // namespace

PlantedModel make_planted_model(const AspectSchema& schema, const PlantedSpec& spec) {
  schema.validate();
  if (spec.content_words < 1 || spec.sentiment_words < 0 || spec.background_words < 0)
    throw UsageError("planted model: word counts must be positive");
  WordRoles roles;
  for (int k = 0; k < schema.num_aspects(); ++k) {
    const std::string name = lower(schema.aspects[k]);
    roles.content.emplace_back(name, k);
    for (int i = 1; i < spec.content_words; ++i)
      roles.content.emplace_back(fmt::format("{}_n{}", name, i), k);
    for (int v = 0; v < schema.num_levels(k); ++v)
      for (int i = 0; i < spec.sentiment_words; ++i)
        roles.sentiment.push_back({fmt::format("{}_a{}_{}", name, v, i), k, v});
  }
  for (int i = 0; i < spec.background_words; ++i) roles.background.push_back(fmt::format("bg{}", i));
  return build(schema, roles, spec.content_weight, spec.sentiment_weight, spec.exclusive_support);
}

PlantedModel planted_from_lexicon(const AspectSchema& schema, const nlohmann::json& lexicon) {
  schema.validate();
  WordRoles roles;
  try {
    const double content_weight = lexicon.value("content_weight", 3.0);
    const double sentiment_weight = lexicon.value("sentiment_weight", 3.0);
    for (const auto& w : lexicon.value("background", nlohmann::json::array()))
      roles.background.push_back(w.get<std::string>());
    for (const auto& [name, entry] : lexicon.at("aspects").items()) {
      const auto k = schema.aspect_index(name);
      if (!k) throw DataError(fmt::format("lexicon names unknown aspect '{}'", name));
      for (const auto& w : entry.value("content", nlohmann::json::array()))
        roles.content.emplace_back(w.get<std::string>(), *k);
      const auto sentiment = entry.value("sentiment", nlohmann::json::object());
      for (const auto& [level_text, words] : sentiment.items()) {
        const auto v = schema.level_index(*k, std::stod(level_text));
        if (!v)
          throw DataError(fmt::format("lexicon level '{}' is not a level of '{}'", level_text, name));
        for (const auto& w : words) roles.sentiment.push_back({w.get<std::string>(), *k, *v});
      }
    }
    return build(schema, roles, content_weight, sentiment_weight, false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("lexicon: {}", e.what()));
  } catch (const std::invalid_argument&) {
    throw DataError("lexicon: rating level keys must be numbers");
  }
}

SyntheticCorpus generate_synthetic(const AspectSchema& schema, const PlantedModel& planted,
                                   int n_reviews, std::uint64_t rng_seed,
                                   const SyntheticOptions& options) {
  if (n_reviews < 0) throw UsageError("n_reviews must be non-negative");
  if (options.min_sentences < 1 || options.max_sentences < options.min_sentences ||
      options.min_words < 1 || options.max_words < options.min_words)
    throw UsageError("synthetic options: invalid sentence or word range");
  if (!(options.rating_correlation >= 0.0 && options.rating_correlation <= 1.0))
    throw UsageError("rating_correlation must be in [0, 1]");

  const int K = schema.num_aspects();
  const int V = planted.vocabulary.size();
  std::vector<std::vector<std::discrete_distribution<int>>> word_dist(K);
  for (int k = 0; k < K; ++k) {
    for (int v = 0; v < schema.num_levels(k); ++v) {
      std::vector<double> weights(V);
      double top = kNegInf;
      for (int w = 0; w < V; ++w) {
        weights[w] = planted.params.theta(k, w) + planted.params.phi(k, v, w);
        top = std::max(top, weights[w]);
      }
      if (top == kNegInf)
        throw DataError(fmt::format("planted model gives aspect '{}' no words", schema.aspects[k]));
      for (double& x : weights) x = std::exp(x - top);
      word_dist[k].emplace_back(weights.begin(), weights.end());
    }
  }

  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> n_sent(options.min_sentences, options.max_sentences);
  std::uniform_int_distribution<int> n_words(options.min_words, options.max_words);
  std::uniform_int_distribution<int> any_aspect(0, K - 1);

  SyntheticCorpus out;
  out.corpus.schema = schema;
  std::vector<int> doc_freq(V, 0);
  for (int r = 0; r < n_reviews; ++r) {
    Review review;
    review.review_id = fmt::format("r{:05d}", r);
    review.item_id = fmt::format("i{:04d}", r % 97);
    review.user_id = fmt::format("u{:04d}", r % 89);
    const double base = unit(rng);
    for (int k = 0; k < K; ++k) {
      const int L = schema.num_levels(k);
      int level;
      if (unit(rng) < options.rating_correlation) {
        level = std::min(L - 1, static_cast<int>(base * L));
      } else {
        level = std::uniform_int_distribution<int>(0, L - 1)(rng);
      }
      review.ratings.push_back(level);
    }

    const int n = n_sent(rng);
    std::vector<int> aspects(n);
    if (options.cover_all_aspects && n >= K) {
      std::vector<int> perm(K);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      for (int s = 0; s < n; ++s) aspects[s] = s < K ? perm[s] : any_aspect(rng);
      std::shuffle(aspects.begin(), aspects.end(), rng);
    } else {
      for (int& a : aspects) a = any_aspect(rng);
    }

    std::vector<char> seen(V, 0);
    for (int s = 0; s < n; ++s) {
      const int k = aspects[s];
      Sentence sentence;
      const int len = n_words(rng);
      for (int i = 0; i < len; ++i) {
        const int w = word_dist[k][*review.ratings[k]](rng);
        sentence.tokens.push_back(w);
        if (!seen[w]) {
          seen[w] = 1;
          ++doc_freq[w];
        }
        if (!sentence.raw_text.empty()) sentence.raw_text += ' ';
        sentence.raw_text += planted.vocabulary.word(w);
      }
      if (schema.per_sentence_ratings) sentence.rating = review.ratings[k];
      review.sentences.push_back(std::move(sentence));
    }
    out.corpus.reviews.push_back(std::move(review));
    out.true_labels.push_back(std::move(aspects));
  }
  out.corpus.vocabulary = Vocabulary(planted.vocabulary.words(), doc_freq);
  return out;
}

std::vector<LabeledSentence> planted_labels(const Corpus& corpus,
                                            const std::vector<std::vector<int>>& truth,
                                            std::span<const int> review_indices) {
  std::vector<LabeledSentence> labels;
  for (const int r : review_indices) {
    const auto& review = corpus.reviews.at(r);
    for (int s = 0; s < review.num_sentences(); ++s)
      labels.push_back({review.review_id, s, truth.at(r).at(s)});
  }
  return labels;
}

}  // namespace multiaspect
