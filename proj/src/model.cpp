#include "multiaspect/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "multiaspect/errors.hpp"

namespace multiaspect {

ModelParams::ModelParams(std::vector<int> levels_per_aspect, int vocab_size)
    : levels_(std::move(levels_per_aspect)), vocab_size_(vocab_size) {
  std::size_t offset = 0;
  for (const int L : levels_) {
    phi_start_.push_back(offset);
    offset += static_cast<std::size_t>(L) * vocab_size_;
  }
  theta_.assign(levels_.size() * static_cast<std::size_t>(vocab_size_), 0.0);
  phi_.assign(offset, 0.0);
}

ModelParams::ModelParams(const AspectSchema& schema, int vocab_size)
    : ModelParams(
          [&] {
            std::vector<int> levels;
            for (int k = 0; k < schema.num_aspects(); ++k) levels.push_back(schema.num_levels(k));
            return levels;
          }(),
          vocab_size) {}

double ModelParams::squared_norm() const {
  double sum = 0.0;
  for (const double x : theta_) sum += x * x;
  for (const double x : phi_) sum += x * x;
  return sum;
}

bool ModelParams::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(theta_.begin(), theta_.end(), finite) &&
         std::all_of(phi_.begin(), phi_.end(), finite);
}

std::vector<double> compatibility(const ModelParams& params, std::span<const int> tokens,
                                  std::span<const std::optional<int>> ratings) {
  const int K = params.num_aspects();
  std::vector<double> c(K, 0.0);
  if (tokens.empty()) return c;
  if (static_cast<int>(ratings.size()) != K)
    throw DataError(fmt::format("expected {} ratings, got {}", K, ratings.size()));
  for (int k = 0; k < K; ++k) {
    if (!ratings[k])
      throw MissingRating(fmt::format("rating for aspect {} is missing", k));
    const int v = *ratings[k];
    if (v < 0 || v >= params.num_levels(k))
      throw DataError(fmt::format("rating level {} out of range for aspect {}", v, k));
    double sum = 0.0;
    for (const int w : tokens) sum += params.theta(k, w) + params.phi(k, v, w);
    c[k] = sum;
  }
  return c;
}

std::vector<double> compatibility(const ModelParams& params, const AspectSchema& schema,
                                  const Review& review, int s) {
  const auto ratings = sentence_ratings(schema, review, s);
  return compatibility(params, review.sentences.at(s).tokens, ratings);
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> p(scores.begin(), scores.end());
  if (p.empty()) return p;
  const double top = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& x : p) {
    x = std::exp(x - top);
    z += x;
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> sentence_aspect_probs(const ModelParams& params,
                                          std::span<const int> tokens,
                                          std::span<const std::optional<int>> ratings) {
  return softmax(compatibility(params, tokens, ratings));
}

std::vector<double> sentence_aspect_probs(const ModelParams& params,
                                          const AspectSchema& schema, const Review& review,
                                          int s) {
  return softmax(compatibility(params, schema, review, s));
}

double corpus_log_likelihood(const ModelParams& params, const Corpus& corpus,
                             const std::vector<std::vector<int>>& assignments) {
  if (assignments.size() != corpus.reviews.size())
    throw DataError("assignments must cover every review");
  double ll = 0.0;
  for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
    const auto& review = corpus.reviews[r];
    if (assignments[r].size() != review.sentences.size())
      throw DataError(fmt::format("assignment size mismatch for review '{}'", review.review_id));
    for (int s = 0; s < review.num_sentences(); ++s) {
      const int t = assignments[r][s];
      if (t < 0) {
        if (review.sentences[s].tokens.empty()) continue;
        throw DataError(fmt::format("sentence {} of review '{}' has no assignment", s,
                                    review.review_id));
      }
      const auto c = compatibility(params, corpus.schema, review, s);
      const double top = *std::max_element(c.begin(), c.end());
      double z = 0.0;
      for (const double x : c) z += std::exp(x - top);
      ll += c.at(t) - top - std::log(z);
    }
  }
  return ll;
}

void normalize_phi_in_place(ModelParams& params) {
  const int V = params.vocab_size();
  for (int k = 0; k < params.num_aspects(); ++k) {
    const int L = params.num_levels(k);
    for (int w = 0; w < V; ++w) {
      double sum = 0.0;
      for (int v = 0; v < L; ++v) sum += params.phi(k, v, w);
      const double shift = (1.0 - sum) / L;
      for (int v = 0; v < L; ++v) params.phi(k, v, w) += shift;
      params.theta(k, w) -= shift;
    }
  }
}

ModelParams normalize_phi(ModelParams params) {
  normalize_phi_in_place(params);
  return params;
}

std::vector<WordWeight> top_words(const ModelParams& params, const Vocabulary& vocabulary,
                                  int aspect, std::optional<int> level, int n) {
  if (n < 1) throw UsageError("top_words: n must be at least 1");
  if (aspect < 0 || aspect >= params.num_aspects())
    throw UsageError(fmt::format("unknown aspect index {}", aspect));
  if (level && (*level < 0 || *level >= params.num_levels(aspect)))
    throw UsageError(fmt::format("unknown rating level {} for aspect {}", *level, aspect));
  if (vocabulary.size() != params.vocab_size())
    throw DataError("vocabulary does not match model dimensions");

  std::vector<WordWeight> all;
  all.reserve(vocabulary.size());
  for (int w = 0; w < vocabulary.size(); ++w)
    all.push_back({vocabulary.word(w),
                   level ? params.phi(aspect, *level, w) : params.theta(aspect, w)});
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(n), all.size());
  std::partial_sort(all.begin(), all.begin() + keep, all.end(),
                    [](const WordWeight& a, const WordWeight& b) {
                      if (a.weight != b.weight) return a.weight > b.weight;
                      return a.word < b.word;
                    });
  all.resize(keep);
  return all;
}

void save_model(const Model& model, const std::string& path, const std::string& config_hash) {
  const auto& p = model.params;
  if (p.vocab_size() != model.vocabulary.size() ||
      p.num_aspects() != model.schema.num_aspects())
    throw DataError("save_model: parameter dimensions disagree with schema/vocabulary");
  nlohmann::json j;
  j["format"] = "multiaspect-model";
  j["version"] = kModelFormatVersion;
  j["config_hash"] = config_hash;
  j["schema"] = schema_to_json(model.schema);
  j["vocabulary"] = model.vocabulary.words();
  j["doc_freq"] = model.vocabulary.doc_freqs();
  j["levels"] = p.levels();
  j["theta"] = p.theta_data();
  j["phi"] = p.phi_data();
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  out << j.dump() << '\n';
  if (!out) throw DataError(fmt::format("failed writing '{}'", path));
}

Model load_model(const std::string& path, const AspectSchema* expected) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open model file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: malformed or truncated model file ({})", path, e.what()));
  }
  try {
    if (j.value("format", std::string()) != "multiaspect-model")
      throw DataError(fmt::format("{}: not a model file", path));
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw DataError(fmt::format("{}: model format version {} (expected {})", path, version,
                                  kModelFormatVersion));
    Model model;
    model.schema = schema_from_json(j.at("schema"));
    model.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>(),
                                  j.at("doc_freq").get<std::vector<int>>());
    const auto levels = j.at("levels").get<std::vector<int>>();
    ModelParams params(levels, model.vocabulary.size());
    auto theta = j.at("theta").get<std::vector<double>>();
    auto phi = j.at("phi").get<std::vector<double>>();
    if (theta.size() != params.theta_data().size() || phi.size() != params.phi_data().size())
      throw DataError(fmt::format("{}: parameter arrays have the wrong size", path));
    for (int k = 0; k < model.schema.num_aspects(); ++k)
      if (k >= static_cast<int>(levels.size()) || levels[k] != model.schema.num_levels(k))
        throw DataError(fmt::format("{}: levels disagree with the embedded schema", path));
    if (static_cast<int>(levels.size()) != model.schema.num_aspects())
      throw DataError(fmt::format("{}: levels disagree with the embedded schema", path));
    params.theta_data() = std::move(theta);
    params.phi_data() = std::move(phi);
    model.params = std::move(params);
    if (expected) {
      if (expected->num_aspects() != model.schema.num_aspects())
        throw DataError(fmt::format("{}: model has {} aspects, schema has {}", path,
                                    model.schema.num_aspects(), expected->num_aspects()));
      for (int k = 0; k < expected->num_aspects(); ++k)
        if (expected->num_levels(k) != model.schema.num_levels(k) ||
            expected->aspects[k] != model.schema.aspects[k])
          throw DataError(fmt::format("{}: aspect '{}' disagrees with the schema", path,
                                      expected->aspects[k]));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

}  // namespace multiaspect
