#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"
#include "multiaspect/learning.hpp"

namespace multiaspect {

namespace {

struct LabeledSet {
  Corpus corpus;                   // labeled reviews, ambiguous sentences removed
  std::vector<std::vector<int>> truth;
};

// Reviews that carry at least one label, restricted to their sentences with
// an aspect label.
LabeledSet labeled_reviews(const Corpus& corpus) {
  LabeledSet out;
  out.corpus.schema = corpus.schema;
  out.corpus.vocabulary = corpus.vocabulary;
  const auto table = corpus.label_table();
  const int K = corpus.num_aspects();
  for (int r = 0; r < static_cast<int>(corpus.reviews.size()); ++r) {
    const auto& row = table[r];
    if (std::all_of(row.begin(), row.end(), [](int l) { return l == kUnlabeled; })) continue;
    Review review = corpus.reviews[r];
    review.sentences.clear();
    std::vector<int> truth;
    for (int s = 0; s < corpus.reviews[r].num_sentences(); ++s) {
      if (row[s] >= K) throw DataError(fmt::format("label refers to unknown aspect {}", row[s]));
      if (row[s] < 0) continue;
      review.sentences.push_back(corpus.reviews[r].sentences[s]);
      truth.push_back(row[s]);
    }
    if (truth.empty()) continue;
    out.corpus.reviews.push_back(std::move(review));
    out.truth.push_back(std::move(truth));
  }
  return out;
}

Matrix review_compat(const ModelParams& params, const TrainingData& data, int r, double scale) {
  const int begin = data.review_begin[r];
  const int n = data.review_begin[r + 1] - begin;
  Matrix compat(n, data.num_aspects);
  for (int i = 0; i < n; ++i) {
    auto row = compat.row(i);
    sentence_scores(params, data, begin + i, row);
    for (double& x : row) x *= scale;
  }
  return compat;
}

double labeling_score(const Matrix& compat, std::span<const int> labels) {
  double sum = 0.0;
  for (int s = 0; s < compat.rows(); ++s) sum += compat(s, labels[s]);
  return sum;
}

double zero_one(std::span<const int> labels, std::span<const int> truth) {
  if (labels.empty()) return 0.0;
  int wrong = 0;
  for (std::size_t s = 0; s < labels.size(); ++s) wrong += labels[s] != truth[s];
  return static_cast<double>(wrong) / static_cast<double>(labels.size());
}

// Feasible labeling that agrees with `truth` on as many sentences as possible.
std::vector<int> feasible_target(std::span<const int> truth, int K,
                                 const SegmentOptions& options) {
  Matrix indicator(static_cast<int>(truth.size()), K);
  for (std::size_t s = 0; s < truth.size(); ++s) indicator(static_cast<int>(s), truth[s]) = 1.0;
  return segment_compat(indicator, options);
}

void add_features(ModelParams& params, const TrainingData& data, int s, int aspect,
                  double amount) {
  const auto ratings = data.ratings_of(s);
  for (const int w : data.sentence_tokens(s)) {
    params.theta(aspect, w) += amount;
    params.phi(aspect, ratings[aspect], w) += amount;
  }
}

void scale_all(ModelParams& params, double factor) {
  for (double& x : params.theta_data()) x *= factor;
  for (double& x : params.phi_data()) x *= factor;
}

void accumulate(ModelParams& into, const ModelParams& from, double factor) {
  for (std::size_t i = 0; i < into.theta_data().size(); ++i)
    into.theta_data()[i] += factor * from.theta_data()[i];
  for (std::size_t i = 0; i < into.phi_data().size(); ++i)
    into.phi_data()[i] += factor * from.phi_data()[i];
}

}  // namespace

TrainResult train_supervised(const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  auto set = labeled_reviews(corpus);
  if (set.corpus.reviews.empty()) throw DataError("supervised training needs labeled reviews");
  std::vector<int> all(set.corpus.reviews.size());
  std::iota(all.begin(), all.end(), 0);
  auto data = make_training_data(set.corpus, all);

  const auto options = config.segment_options();
  const int K = data.num_aspects;
  const int R = data.num_reviews();
  std::vector<std::vector<int>> targets(R);
  for (int r = 0; r < R; ++r) targets[r] = feasible_target(set.truth[r], K, options);

  // Pegasos on λΩ + mean hinge, with w = scale · u to keep the shrink O(1).
  const double lambda = 2.0 * config.supervised_reg_weight;
  ModelParams u(data.levels, data.vocab_size);
  double scale = 1.0;
  ModelParams average(data.levels, data.vocab_size);
  int averaged = 0;
  std::mt19937_64 rng(config.seed);
  std::vector<int> order(R);
  std::iota(order.begin(), order.end(), 0);
  std::vector<LogRow> log;
  long t = 0;

  for (int epoch = 0; epoch < config.supervised_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (const int r : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto compat = review_compat(u, data, r, scale);
      const auto predicted = loss_augmented_labels(compat, set.truth[r], options);

      const double shrink = 1.0 - eta * lambda;
      if (shrink <= 0.0) {
        std::fill(u.theta_data().begin(), u.theta_data().end(), 0.0);
        std::fill(u.phi_data().begin(), u.phi_data().end(), 0.0);
        scale = 1.0;
      } else {
        scale *= shrink;
      }
      if (predicted != targets[r]) {
        const int begin = data.review_begin[r];
        const double step = eta / scale;
        for (int i = 0; i < compat.rows(); ++i) {
          if (predicted[i] == targets[r][i]) continue;
          add_features(u, data, begin + i, targets[r][i], step);
          add_features(u, data, begin + i, predicted[i], -step);
        }
      }
      if (scale < 1e-9) {
        scale_all(u, scale);
        scale = 1.0;
      }
    }
    if (2 * (epoch + 1) > config.supervised_epochs) {
      accumulate(average, u, scale);
      ++averaged;
    }

    double hinge = 0.0;
    for (int r = 0; r < R; ++r) {
      const auto compat = review_compat(u, data, r, scale);
      const auto worst = loss_augmented_labels(compat, set.truth[r], options);
      hinge += labeling_score(compat, worst) + zero_one(worst, set.truth[r]) -
               labeling_score(compat, targets[r]);
    }
    const double penalty = scale * scale * u.squared_norm();
    log.push_back({0, epoch, 0, -(hinge / R + config.supervised_reg_weight * penalty), 0});
  }

  scale_all(average, 1.0 / averaged);
  normalize_phi_in_place(average);
  if (!average.all_finite()) throw NumericalError("supervised training diverged");

  TrainResult result;
  result.state = AssignmentState::unassigned(data);
  for (int r = 0; r < R; ++r) {
    const int begin = data.review_begin[r];
    for (std::size_t i = 0; i < set.truth[r].size(); ++i) {
      result.state.labels[begin + i] = set.truth[r][i];
      result.state.observed[begin + i] = 1;
    }
  }
  result.objective = log.back().objective;
  result.outer_iterations = config.supervised_epochs;
  result.log = std::move(log);
  result.params = std::move(average);
  result.data = std::move(data);
  return result;
}

HingeValue structured_hinge(const ModelParams& params, const Corpus& corpus,
                            const SegmentOptions& options) {
  auto set = labeled_reviews(corpus);
  HingeValue out;
  if (set.corpus.reviews.empty()) return out;
  std::vector<int> all(set.corpus.reviews.size());
  std::iota(all.begin(), all.end(), 0);
  const auto data = make_training_data(set.corpus, all);
  const int R = data.num_reviews();
  for (int r = 0; r < R; ++r) {
    const auto compat = review_compat(params, data, r, 1.0);
    const auto target = feasible_target(set.truth[r], data.num_aspects, options);
    const auto worst = loss_augmented_labels(compat, set.truth[r], options);
    const auto predicted = segment_compat(compat, options);
    out.hinge += labeling_score(compat, worst) + zero_one(worst, set.truth[r]) -
                 labeling_score(compat, target);
    out.loss += zero_one(predicted, set.truth[r]);
  }
  out.hinge /= R;
  out.loss /= R;
  return out;
}

}  // namespace multiaspect
