#include "multiaspect/eval.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

void AgreementCount::add(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("prediction and truth lengths differ");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) {
      ++excluded;
      continue;
    }
    ++total;
    agree += predicted[i] == truth[i];
  }
}

double AgreementCount::accuracy() const {
  if (total == 0) throw DataError("no labeled sentences to evaluate");
  return static_cast<double>(agree) / static_cast<double>(total);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  AgreementCount count;
  count.add(predicted, truth);
  return count.accuracy();
}

double cohens_kappa(double agreement, int num_aspects) {
  if (num_aspects < 2) throw std::invalid_argument("kappa needs at least two aspects");
  const double chance = 1.0 / num_aspects;
  return (agreement - chance) / (1.0 - chance);
}

double rating_mse(const std::vector<std::vector<int>>& predictions,
                  const std::vector<std::vector<std::optional<int>>>& truths,
                  const AspectSchema& schema) {
  if (predictions.size() != truths.size())
    throw std::invalid_argument("prediction and truth counts differ");
  const auto overall = schema.overall_aspect();
  double sum = 0.0;
  long count = 0;
  for (std::size_t r = 0; r < truths.size(); ++r) {
    for (int k = 0; k < schema.num_aspects(); ++k) {
      if (overall && k == *overall) continue;
      if (!truths[r][k]) continue;
      const double d = schema.scaled_value(k, predictions[r].at(k)) -
                       schema.scaled_value(k, *truths[r][k]);
      sum += d * d;
      ++count;
    }
  }
  if (count == 0) throw DataError("no observed ratings to evaluate");
  return sum / static_cast<double>(count);
}

std::vector<RankedSentence> rank_sentences(const ModelParams& params, const Corpus& corpus,
                                           int aspect) {
  if (aspect < 0 || aspect >= corpus.num_aspects())
    throw UsageError(fmt::format("aspect index {} out of range", aspect));
  std::vector<RankedSentence> out;
  for (int r = 0; r < static_cast<int>(corpus.reviews.size()); ++r) {
    const auto& review = corpus.reviews[r];
    bool rated = true;
    for (int s = 0; s < review.num_sentences() && rated; ++s)
      for (const auto& v : sentence_ratings(corpus.schema, review, s)) rated = rated && v.has_value();
    if (!rated) continue;
    for (int s = 0; s < review.num_sentences(); ++s) {
      const auto probs = sentence_aspect_probs(params, corpus.schema, review, s);
      out.push_back({r, s, probs[aspect]});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedSentence& a, const RankedSentence& b) {
    return a.probability > b.probability;
  });
  return out;
}

PrResult pr_curve_and_map(std::span<const char> relevant) {
  const long positives = std::count_if(relevant.begin(), relevant.end(), [](char c) { return c != 0; });
  if (positives == 0) throw DataError("precision/recall needs at least one relevant item");
  PrResult out;
  long hits = 0;
  double precision_sum = 0.0;
  for (std::size_t i = 0; i < relevant.size(); ++i) {
    const double precision_at = static_cast<double>(hits + (relevant[i] != 0)) / (i + 1);
    if (relevant[i]) {
      ++hits;
      precision_sum += precision_at;
    }
    out.curve.push_back({static_cast<double>(hits) / positives, precision_at});
  }
  out.average_precision = precision_sum / positives;
  return out;
}

double mean_average_precision(std::span<const PrResult> per_aspect) {
  if (per_aspect.empty()) throw DataError("no aspects to average");
  double sum = 0.0;
  for (const auto& r : per_aspect) sum += r.average_precision;
  return sum / static_cast<double>(per_aspect.size());
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j;
  j["task"] = report.task;
  if (report.accuracy) j["accuracy"] = *report.accuracy;
  if (report.kappa) j["kappa"] = *report.kappa;
  if (report.mse) j["mse"] = *report.mse;
  if (report.map) j["map"] = *report.map;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [name, value] : report.per_aspect) per[name] = value;
  if (!report.per_aspect.empty()) j["per_aspect"] = per;
  j["evaluated"] = report.evaluated;
  j["excluded_ambiguous"] = report.excluded_ambiguous;
  j["excluded_missing"] = report.excluded_missing;
  return j;
}

}  // namespace multiaspect
