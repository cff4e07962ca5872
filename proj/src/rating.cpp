#include "multiaspect/rating.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "multiaspect/errors.hpp"

namespace multiaspect {

std::string_view predictor_name(Predictor predictor) {
  switch (predictor) {
    case Predictor::Unsegmented:
      return "unsegmented";
    case Predictor::Segmented:
      return "segmented";
    case Predictor::Joint:
      return "joint";
  }
  return "unsegmented";
}

Predictor parse_predictor(std::string_view name) {
  if (name == "unsegmented") return Predictor::Unsegmented;
  if (name == "segmented") return Predictor::Segmented;
  if (name == "joint") return Predictor::Joint;
  throw UsageError(fmt::format("unknown predictor '{}' (unsegmented, segmented, joint)", name));
}

RatingParams::RatingParams(std::vector<int> levels_per_aspect, int vocab_size)
    : levels_(std::move(levels_per_aspect)), vocab_size_(vocab_size) {
  std::size_t total = 0;
  for (const int L : levels_) {
    start_.push_back(total);
    total += static_cast<std::size_t>(L) * vocab_size_;
  }
  data_.assign(total, 0.0);
}

PairwiseParams::PairwiseParams(std::vector<int> levels_per_aspect)
    : levels_(std::move(levels_per_aspect)) {
  const int K = num_aspects();
  std::size_t total = 0;
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      start_.push_back(total);
      total += static_cast<std::size_t>(levels_[i]) * levels_[j];
    }
  data_.assign(total, 0.0);
}

std::size_t PairwiseParams::index(int i, int j, int vi, int vj) const {
  const int K = num_aspects();
  const std::size_t pair = static_cast<std::size_t>(i) * K - i * (i + 1) / 2 + (j - i - 1);
  return start_[pair] + static_cast<std::size_t>(vi) * levels_[j] + vj;
}

double PairwiseParams::operator()(int i, int j, int vi, int vj) const {
  if (i == j) throw std::invalid_argument("pairwise term needs two distinct aspects");
  return i < j ? data_[index(i, j, vi, vj)] : data_[index(j, i, vj, vi)];
}

double& PairwiseParams::at(int i, int j, int vi, int vj) {
  if (!(i < j)) throw std::invalid_argument("PairwiseParams::at requires i < j");
  return data_[index(i, j, vi, vj)];
}

std::vector<std::vector<double>> text_scores(const RatingParams& gamma, const Review& review,
                                             std::span<const int> labels) {
  const int K = gamma.num_aspects();
  if (!labels.empty() && static_cast<int>(labels.size()) != review.num_sentences())
    throw UsageError("segment labels do not match the review's sentences");
  std::vector<std::vector<double>> scores(K);
  for (int k = 0; k < K; ++k) {
    scores[k].assign(gamma.num_levels(k), 0.0);
    for (int s = 0; s < review.num_sentences(); ++s) {
      if (!labels.empty() && labels[s] != k) continue;
      for (int v = 0; v < gamma.num_levels(k); ++v) {
        const double* row = gamma.data().data() + gamma.offset(k, v);
        double sum = 0.0;
        for (const int w : review.sentences[s].tokens) sum += row[w];
        scores[k][v] += sum;
      }
    }
  }
  return scores;
}

namespace {

int argmax(const std::vector<double>& xs) {
  return static_cast<int>(std::max_element(xs.begin(), xs.end()) - xs.begin());
}

std::vector<int> independent_argmax(const std::vector<std::vector<double>>& unary) {
  std::vector<int> out;
  for (const auto& u : unary) out.push_back(argmax(u));
  return out;
}

}  // namespace

RatingPrediction predict_unsegmented(const RatingParams& gamma, const Review& review) {
  return {independent_argmax(text_scores(gamma, review)), Predictor::Unsegmented};
}

RatingPrediction predict_segmented(const RatingParams& gamma, const Review& review,
                                   std::span<const int> labels) {
  if (labels.empty() && review.num_sentences() > 0)
    throw UsageError("segmented prediction needs sentence labels");
  return {independent_argmax(text_scores(gamma, review, labels)), Predictor::Segmented};
}

std::vector<int> joint_argmax(const std::vector<std::vector<double>>& unary,
                              const PairwiseParams& alpha,
                              std::span<const std::optional<int>> clamp, std::uint64_t budget) {
  const int K = static_cast<int>(unary.size());
  if (alpha.num_aspects() != K) throw std::invalid_argument("joint_argmax: aspect count mismatch");
  if (!clamp.empty() && static_cast<int>(clamp.size()) != K)
    throw std::invalid_argument("joint_argmax: clamp size mismatch");

  std::vector<int> free;
  std::vector<int> current(K, 0);
  std::uint64_t configurations = 1;
  for (int k = 0; k < K; ++k) {
    const int L = static_cast<int>(unary[k].size());
    if (!clamp.empty() && clamp[k]) {
      if (*clamp[k] < 0 || *clamp[k] >= L)
        throw std::invalid_argument("joint_argmax: clamped level out of range");
      current[k] = *clamp[k];
      continue;
    }
    free.push_back(k);
    if (configurations > budget / static_cast<std::uint64_t>(L) + 1)
      throw UsageError(fmt::format("joint inference exceeds the budget of {} configurations",
                                   budget));
    configurations *= static_cast<std::uint64_t>(L);
  }
  if (configurations > budget)
    throw UsageError(
        fmt::format("joint inference needs {} configurations, budget is {}", configurations, budget));

  auto score = [&](const std::vector<int>& y) {
    double total = 0.0;
    for (int k = 0; k < K; ++k) total += unary[k][y[k]];
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j) total += 2.0 * alpha(i, j, y[i], y[j]);
    return total;
  };

  std::vector<int> best = current;
  double best_score = -std::numeric_limits<double>::infinity();
  while (true) {
    const double value = score(current);
    if (value > best_score) {
      best_score = value;
      best = current;
    }
    // Advance the last free coordinate fastest, giving lexicographic order.
    int pos = static_cast<int>(free.size()) - 1;
    for (; pos >= 0; --pos) {
      const int k = free[pos];
      if (++current[k] < static_cast<int>(unary[k].size())) break;
      current[k] = 0;
    }
    if (pos < 0) break;
  }
  return best;
}

RatingPrediction predict_joint(const RatingParams& gamma, const PairwiseParams& alpha,
                               const Review& review, std::span<const int> labels,
                               std::span<const std::optional<int>> clamp, std::uint64_t budget) {
  if (labels.empty() && review.num_sentences() > 0)
    throw UsageError("joint prediction needs sentence labels");
  return {joint_argmax(text_scores(gamma, review, labels), alpha, clamp, budget),
          Predictor::Joint};
}

namespace {

struct Weights {
  RatingParams gamma;
  PairwiseParams alpha;

  void scale(double f) {
    for (double& x : gamma.data()) x *= f;
    for (double& x : alpha.data()) x *= f;
  }
  void accumulate(const Weights& other, double f) {
    for (std::size_t i = 0; i < gamma.data().size(); ++i) gamma.data()[i] += f * other.gamma.data()[i];
    for (std::size_t i = 0; i < alpha.data().size(); ++i) alpha.data()[i] += f * other.alpha.data()[i];
  }
  void clear() {
    std::fill(gamma.data().begin(), gamma.data().end(), 0.0);
    std::fill(alpha.data().begin(), alpha.data().end(), 0.0);
  }
};

void add_features(Weights& w, const Review& review, std::span<const int> labels,
                  const std::vector<int>& y, bool pairwise, double amount) {
  const int K = w.gamma.num_aspects();
  for (int s = 0; s < review.num_sentences(); ++s) {
    for (int k = 0; k < K; ++k) {
      if (!labels.empty() && labels[s] != k) continue;
      double* row = w.gamma.data().data() + w.gamma.offset(k, y[k]);
      for (const int t : review.sentences[s].tokens) row[t] += amount;
    }
  }
  if (pairwise)
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j) w.alpha.at(i, j, y[i], y[j]) += 2.0 * amount;
}

}  // namespace

RatingModel train_rating_model(const Corpus& corpus, const std::vector<std::vector<int>>& labels,
                               Predictor predictor, const RatingTrainConfig& config) {
  if (!(config.reg_weight > 0.0)) throw UsageError("reg_weight must be positive");
  if (config.epochs < 1) throw UsageError("epochs must be at least 1");
  const auto& schema = corpus.schema;
  const int K = schema.num_aspects();
  const int V = corpus.vocabulary.size();
  const bool segmented = predictor != Predictor::Unsegmented;
  const bool joint = predictor == Predictor::Joint;
  const auto overall = schema.overall_aspect();
  if (segmented && labels.size() != corpus.reviews.size())
    throw UsageError("segmented rating models need segment labels for every review");

  std::vector<int> reviews;
  for (int r = 0; r < static_cast<int>(corpus.reviews.size()); ++r)
    if (corpus.reviews[r].fully_rated()) reviews.push_back(r);
  if (reviews.empty()) throw DataError("no fully rated reviews to train the rating model");

  std::vector<int> levels;
  for (int k = 0; k < K; ++k) levels.push_back(schema.num_levels(k));
  Weights u{RatingParams(levels, V), PairwiseParams(levels)};
  Weights average = u;
  double scale = 1.0;
  int averaged = 0;
  const double lambda = 2.0 * config.reg_weight;
  std::mt19937_64 rng(config.seed);
  long t = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(reviews.begin(), reviews.end(), rng);
    for (const int r : reviews) {
      ++t;
      const auto& review = corpus.reviews[r];
      const std::span<const int> seg =
          segmented ? std::span<const int>(labels[r]) : std::span<const int>();
      if (segmented && static_cast<int>(seg.size()) != review.num_sentences())
        throw UsageError(fmt::format("segment labels of review '{}' do not match its sentences",
                                     review.review_id));
      std::vector<int> truth(K);
      for (int k = 0; k < K; ++k) truth[k] = *review.ratings[k];

      auto unary = text_scores(u.gamma, review, seg);
      for (int k = 0; k < K; ++k)
        for (int v = 0; v < levels[k]; ++v) {
          const double d = schema.scaled_value(k, v) - schema.scaled_value(k, truth[k]);
          unary[k][v] = scale * unary[k][v] + d * d;
        }
      std::vector<int> worst;
      if (joint) {
        std::vector<std::optional<int>> clamp(K);
        if (overall) clamp[*overall] = truth[*overall];
        PairwiseParams alpha = u.alpha;
        for (double& x : alpha.data()) x *= scale;
        worst = joint_argmax(unary, alpha, clamp, config.budget);
      } else {
        worst = independent_argmax(unary);
      }

      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        u.clear();
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (worst != truth) {
        add_features(u, review, seg, truth, joint, eta / scale);
        add_features(u, review, seg, worst, joint, -eta / scale);
      }
      if (scale < 1e-9) {
        u.scale(scale);
        scale = 1.0;
      }
    }
    if (2 * (epoch + 1) > config.epochs) {
      average.accumulate(u, scale);
      ++averaged;
    }
  }
  average.scale(1.0 / averaged);

  RatingModel model;
  model.schema = schema;
  model.vocabulary = corpus.vocabulary;
  model.predictor = predictor;
  model.gamma = std::move(average.gamma);
  model.alpha = std::move(average.alpha);
  return model;
}

RatingPrediction predict(const RatingModel& model, const Review& review,
                         std::span<const int> labels) {
  const int K = model.schema.num_aspects();
  const auto overall = model.schema.overall_aspect();
  std::vector<std::optional<int>> clamp(K);
  if (overall && *overall < static_cast<int>(review.ratings.size()))
    clamp[*overall] = review.ratings[*overall];

  RatingPrediction out;
  switch (model.predictor) {
    case Predictor::Unsegmented:
      out = predict_unsegmented(model.gamma, review);
      break;
    case Predictor::Segmented:
      out = predict_segmented(model.gamma, review, labels);
      break;
    case Predictor::Joint:
      return predict_joint(model.gamma, model.alpha, review, labels, clamp);
  }
  for (int k = 0; k < K; ++k)
    if (clamp[k]) out.levels[k] = *clamp[k];
  return out;
}

void save_rating_model(const RatingModel& model, const std::string& path,
                       const std::string& config_hash) {
  nlohmann::json j;
  j["format"] = "multiaspect-rating-model";
  j["version"] = 1;
  j["config_hash"] = config_hash;
  j["predictor"] = std::string(predictor_name(model.predictor));
  j["schema"] = schema_to_json(model.schema);
  j["vocabulary"] = model.vocabulary.words();
  j["doc_freq"] = model.vocabulary.doc_freqs();
  j["levels"] = model.gamma.levels();
  j["gamma"] = model.gamma.data();
  j["alpha"] = model.alpha.data();
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  out << j.dump() << '\n';
  if (!out) throw DataError(fmt::format("failed writing '{}'", path));
}

RatingModel load_rating_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open rating model '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(buffer.str());
    if (j.value("format", std::string()) != "multiaspect-rating-model")
      throw DataError(fmt::format("{}: not a rating model file", path));
    if (j.at("version").get<int>() != 1)
      throw DataError(fmt::format("{}: unsupported rating model version", path));
    RatingModel model;
    model.schema = schema_from_json(j.at("schema"));
    model.vocabulary = Vocabulary(j.at("vocabulary").get<std::vector<std::string>>(),
                                  j.at("doc_freq").get<std::vector<int>>());
    model.predictor = parse_predictor(j.at("predictor").get<std::string>());
    std::vector<int> levels;
    for (int k = 0; k < model.schema.num_aspects(); ++k) levels.push_back(model.schema.num_levels(k));
    if (j.at("levels").get<std::vector<int>>() != levels)
      throw DataError(fmt::format("{}: levels disagree with the embedded schema", path));
    model.gamma = RatingParams(levels, model.vocabulary.size());
    model.alpha = PairwiseParams(levels);
    auto gamma = j.at("gamma").get<std::vector<double>>();
    auto alpha = j.at("alpha").get<std::vector<double>>();
    if (gamma.size() != model.gamma.data().size() || alpha.size() != model.alpha.data().size())
      throw DataError(fmt::format("{}: parameter arrays have the wrong size", path));
    model.gamma.data() = std::move(gamma);
    model.alpha.data() = std::move(alpha);
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: malformed rating model ({})", path, e.what()));
  }
}

}  // namespace multiaspect
