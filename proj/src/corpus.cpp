#include "multiaspect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "multiaspect/errors.hpp"

namespace multiaspect {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<int> doc_freq)
    : words_(std::move(words)), doc_freq_(std::move(doc_freq)) {
  if (doc_freq_.empty()) doc_freq_.assign(words_.size(), 0);
  if (doc_freq_.size() != words_.size())
    throw DataError("vocabulary: document frequency count does not match word count");
  index_.reserve(words_.size());
  for (int i = 0; i < size(); ++i)
    if (!index_.emplace(words_[i], i).second)
      throw DataError(fmt::format("vocabulary: duplicate word '{}'", words_[i]));
}

std::optional<int> Vocabulary::find(const std::string& word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Review::fully_rated() const {
  return std::all_of(ratings.begin(), ratings.end(), [](const auto& r) { return r.has_value(); });
}

std::optional<int> Corpus::review_index(const std::string& review_id) const {
  for (int r = 0; r < static_cast<int>(reviews.size()); ++r)
    if (reviews[r].review_id == review_id) return r;
  return std::nullopt;
}

std::vector<std::vector<int>> Corpus::label_table() const {
  std::vector<std::vector<int>> table(reviews.size());
  std::map<std::string, int> by_id;
  for (int r = 0; r < static_cast<int>(reviews.size()); ++r) {
    table[r].assign(reviews[r].sentences.size(), kUnlabeled);
    by_id.emplace(reviews[r].review_id, r);
  }
  for (const auto& l : labels) {
    const auto it = by_id.find(l.review_id);
    if (it == by_id.end())
      throw DataError(fmt::format("label refers to unknown review '{}'", l.review_id));
    auto& row = table[it->second];
    if (l.sentence_index < 0 || l.sentence_index >= static_cast<int>(row.size()))
      throw DataError(fmt::format("label sentence index {} out of range for review '{}'",
                                  l.sentence_index, l.review_id));
    row[l.sentence_index] = l.label;
  }
  return table;
}

Vocabulary build_vocabulary(std::span<const RawReview> reviews, int min_df) {
  if (min_df < 1) throw UsageError("min_df must be at least 1");
  std::map<std::string, int> df;
  for (const auto& review : reviews) {
    std::set<std::string_view> seen;
    for (const auto& s : review.sentences)
      for (const auto& w : s.words) seen.insert(w);
    for (const auto w : seen) ++df[std::string(w)];
  }
  std::vector<std::string> words;
  std::vector<int> freqs;
  for (const auto& [w, f] : df) {
    if (f < min_df) continue;
    words.push_back(w);
    freqs.push_back(f);
  }
  return Vocabulary(std::move(words), std::move(freqs));
}

namespace {

std::string id_field(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return {};
  const auto& v = obj[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

int rating_level(const AspectSchema& schema, int k, const nlohmann::json& value, int line) {
  if (!value.is_number())
    throw DataError(fmt::format("line {}: rating for aspect '{}' is not a number", line,
                                schema.aspects[k]));
  const double x = value.get<double>();
  const auto level = schema.level_index(k, x);
  if (!level)
    throw DataError(fmt::format("line {}: rating {} for aspect '{}' is not a permitted level",
                                line, x, schema.aspects[k]));
  return *level;
}

RawReview parse_review(const nlohmann::json& obj, const AspectSchema& schema, int line) {
  if (!obj.is_object()) throw DataError(fmt::format("line {}: expected a JSON object", line));
  RawReview review;
  review.review_id = id_field(obj, "review_id");
  if (review.review_id.empty())
    throw DataError(fmt::format("line {}: missing review_id", line));
  review.item_id = id_field(obj, "item_id");
  review.user_id = id_field(obj, "user_id");

  if (obj.contains("sentences")) {
    if (!obj["sentences"].is_array())
      throw DataError(fmt::format("line {}: 'sentences' must be a list of strings", line));
    for (const auto& s : obj["sentences"]) {
      if (!s.is_string())
        throw DataError(fmt::format("line {}: 'sentences' must be a list of strings", line));
      const auto text = s.get<std::string>();
      review.sentences.push_back({tokenize_words(text), text});
    }
  } else if (obj.contains("text")) {
    if (!obj["text"].is_string())
      throw DataError(fmt::format("line {}: 'text' must be a string", line));
    review.sentences = tokenize(obj["text"].get<std::string>());
  } else {
    throw DataError(fmt::format("line {}: review needs 'text' or 'sentences'", line));
  }

  const int K = schema.num_aspects();
  review.ratings.assign(K, std::nullopt);
  if (obj.contains("ratings")) {
    const auto& ratings = obj["ratings"];
    if (!ratings.is_object())
      throw DataError(fmt::format("line {}: 'ratings' must be an object", line));
    for (const auto& [name, value] : ratings.items()) {
      const auto k = schema.aspect_index(name);
      if (!k) throw DataError(fmt::format("line {}: unknown aspect '{}'", line, name));
      if (value.is_null()) continue;
      review.ratings[*k] = rating_level(schema, *k, value, line);
    }
  }

  if (schema.per_sentence_ratings) {
    review.sentence_ratings.assign(review.sentences.size(), std::nullopt);
    if (obj.contains("sentence_ratings")) {
      const auto& sr = obj["sentence_ratings"];
      if (!sr.is_array() || sr.size() != review.sentences.size())
        throw DataError(fmt::format(
            "line {}: 'sentence_ratings' must have one entry per sentence", line));
      for (std::size_t s = 0; s < sr.size(); ++s)
        if (!sr[s].is_null()) review.sentence_ratings[s] = rating_level(schema, 0, sr[s], line);
    }
  }
  return review;
}

}  // namespace

std::vector<RawReview> read_raw_reviews(const std::string& path, const AspectSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open review file '{}'", path));
  std::vector<RawReview> reviews;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(fmt::format("{}: line {}: malformed JSON ({})", path, line, e.what()));
    }
    try {
      reviews.push_back(parse_review(obj, schema, line));
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}: {}", path, e.what()));
    }
  }
  return reviews;
}

Corpus index_corpus(const AspectSchema& schema, std::span<const RawReview> raw,
                    Vocabulary vocabulary) {
  Corpus corpus;
  corpus.schema = schema;
  corpus.vocabulary = std::move(vocabulary);
  corpus.reviews.reserve(raw.size());
  for (const auto& r : raw) {
    Review review{r.review_id, r.item_id, r.user_id, {}, r.ratings};
    for (std::size_t s = 0; s < r.sentences.size(); ++s) {
      Sentence sentence;
      sentence.raw_text = r.sentences[s].raw_text;
      for (const auto& w : r.sentences[s].words)
        if (const auto idx = corpus.vocabulary.find(w)) sentence.tokens.push_back(*idx);
      if (schema.per_sentence_ratings && s < r.sentence_ratings.size())
        sentence.rating = r.sentence_ratings[s];
      review.sentences.push_back(std::move(sentence));
    }
    corpus.reviews.push_back(std::move(review));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, const AspectSchema& schema,
                   const LoadOptions& options) {
  schema.validate();
  const auto raw = read_raw_reviews(path, schema);
  Vocabulary vocabulary =
      options.vocabulary ? *options.vocabulary : build_vocabulary(raw, options.min_df);
  return index_corpus(schema, raw, std::move(vocabulary));
}

void save_corpus(const Corpus& corpus, const std::string& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  const auto& schema = corpus.schema;
  for (const auto& review : corpus.reviews) {
    nlohmann::json obj;
    obj["review_id"] = review.review_id;
    obj["item_id"] = review.item_id;
    obj["user_id"] = review.user_id;
    auto sentences = nlohmann::json::array();
    for (const auto& s : review.sentences) sentences.push_back(s.raw_text);
    obj["sentences"] = std::move(sentences);
    auto ratings = nlohmann::json::object();
    for (int k = 0; k < schema.num_aspects(); ++k)
      if (review.ratings[k]) ratings[schema.aspects[k]] = schema.level_value(k, *review.ratings[k]);
    obj["ratings"] = std::move(ratings);
    if (schema.per_sentence_ratings) {
      auto sr = nlohmann::json::array();
      for (const auto& s : review.sentences)
        sr.push_back(s.rating ? nlohmann::json(schema.level_value(0, *s.rating)) : nlohmann::json());
      obj["sentence_ratings"] = std::move(sr);
    }
    if (!config_hash.empty()) obj["config_hash"] = config_hash;
    out << obj.dump() << '\n';
  }
}

std::vector<LabeledSentence> load_labels(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open label file '{}'", path));
  std::map<std::string, int> sizes;
  for (const auto& r : corpus.reviews) sizes.emplace(r.review_id, r.num_sentences());

  std::vector<LabeledSentence> labels;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.empty() || text[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(text);
    for (std::string f; std::getline(ss, f, '\t');) fields.push_back(f);
    if (fields.size() != 3)
      throw DataError(fmt::format("{}: line {}: expected 3 tab-separated columns", path, line));
    LabeledSentence l;
    l.review_id = fields[0];
    try {
      std::size_t used = 0;
      l.sentence_index = std::stoi(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(fmt::format("{}: line {}: bad sentence index '{}'", path, line, fields[1]));
    }
    if (fields[2] == "ambiguous") {
      l.label = kAmbiguous;
    } else {
      const auto k = corpus.schema.aspect_index(fields[2]);
      if (!k) throw DataError(fmt::format("{}: line {}: unknown aspect '{}'", path, line, fields[2]));
      l.label = *k;
    }
    const auto it = sizes.find(l.review_id);
    if (it == sizes.end())
      throw DataError(fmt::format("{}: line {}: unknown review '{}'", path, line, l.review_id));
    if (l.sentence_index < 0 || l.sentence_index >= it->second)
      throw DataError(fmt::format("{}: line {}: sentence index {} out of range", path, line,
                                  l.sentence_index));
    labels.push_back(std::move(l));
  }
  return labels;
}

void save_labels(const std::vector<LabeledSentence>& labels, const AspectSchema& schema,
                 const std::string& path, const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  for (const auto& l : labels)
    out << l.review_id << '\t' << l.sentence_index << '\t'
        << (l.label == kAmbiguous ? std::string("ambiguous") : schema.aspects.at(l.label)) << '\n';
}

Corpus subset(const Corpus& corpus, std::span<const int> indices) {
  Corpus out;
  out.schema = corpus.schema;
  out.vocabulary = corpus.vocabulary;
  std::set<std::string> ids;
  for (const int r : indices) {
    out.reviews.push_back(corpus.reviews.at(r));
    ids.insert(corpus.reviews[r].review_id);
  }
  for (const auto& l : corpus.labels)
    if (ids.count(l.review_id)) out.labels.push_back(l);
  return out;
}

std::pair<Corpus, Corpus> split(const Corpus& corpus, double train_fraction,
                                std::uint64_t rng_seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw UsageError("train_fraction must lie strictly between 0 and 1");
  const int n = static_cast<int>(corpus.reviews.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(rng_seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int n_train = static_cast<int>(std::lround(train_fraction * n));
  std::vector<int> train(order.begin(), order.begin() + n_train);
  std::vector<int> test(order.begin() + n_train, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset(corpus, train), subset(corpus, test)};
}

std::vector<std::optional<int>> sentence_ratings(const AspectSchema& schema,
                                                 const Review& review, int s) {
  if (schema.per_sentence_ratings)
    return std::vector<std::optional<int>>(schema.num_aspects(), review.sentences.at(s).rating);
  return review.ratings;
}

}  // namespace multiaspect
