#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "multiaspect/corpus.hpp"
#include "multiaspect/model.hpp"

namespace multiaspect {

/// Fraction of positions where predicted == truth, skipping positions whose
/// truth is ambiguous or unlabeled.
double accuracy(std::span<const int> predicted, std::span<const int> truth);

struct AgreementCount {
  long agree = 0;
  long total = 0;
  long excluded = 0;
  void add(std::span<const int> predicted, std::span<const int> truth);
  double accuracy() const;
};

/// κ = (agreement - 1/K) / (1 - 1/K).
double cohens_kappa(double agreement, int num_aspects);

/// Mean squared error of scaled ratings over (review, non-overall aspect)
/// pairs whose truth is present.
double rating_mse(const std::vector<std::vector<int>>& predictions,
                  const std::vector<std::vector<std::optional<int>>>& truths,
                  const AspectSchema& schema);

struct RankedSentence {
  int review = 0;
  int sentence = 0;
  double probability = 0.0;
};

/// All sentences of fully rated reviews sorted by p(aspect | s) descending;
/// equal probabilities keep corpus order.
std::vector<RankedSentence> rank_sentences(const ModelParams& params, const Corpus& corpus,
                                           int aspect);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct PrResult {
  std::vector<PrPoint> curve;
  double average_precision = 0.0;
};

/// Precision/recall at every rank and AP (precision averaged over the ranks
/// of positives). Throws DataError without positives.
PrResult pr_curve_and_map(std::span<const char> relevant_in_rank_order);

double mean_average_precision(std::span<const PrResult> per_aspect);

struct EvalReport {
  std::string task;
  std::optional<double> accuracy;
  std::optional<double> kappa;
  std::optional<double> mse;
  std::optional<double> map;
  std::vector<std::pair<std::string, double>> per_aspect;
  long evaluated = 0;
  long excluded_ambiguous = 0;
  long excluded_missing = 0;
};

nlohmann::json to_json(const EvalReport& report);

}  // namespace multiaspect
