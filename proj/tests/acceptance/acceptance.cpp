// Acceptance report: one PASS/FAIL line per criterion.
//
// Usage: acceptance <data-dir> <work-dir> [known-red ids...]
//
// Exits nonzero when a criterion outside the known-red list fails.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../oracles.hpp"
#include "multiaspect/assignment.hpp"
#include "multiaspect/config.hpp"
#include "multiaspect/errors.hpp"
#include "multiaspect/eval.hpp"
#include "multiaspect/hungarian.hpp"
#include "multiaspect/learning.hpp"
#include "multiaspect/rating.hpp"
#include "multiaspect/synthetic.hpp"

namespace fs = std::filesystem;
using namespace multiaspect;

namespace {

// Tolerances and sizes pinned by the acceptance criteria.
constexpr double kFdStep = 1e-5;
constexpr double kGradientTolerance = 1e-4;
constexpr double kRecoveryThreshold = 0.80;
constexpr double kRecoverySeconds = 300.0;
constexpr double kGradientSeconds = 60.0;
constexpr double kMatchingSeconds = 60.0;
constexpr double kRatingMargin = 0.05;
constexpr double kMinRatingCorrelation = 0.6;
constexpr double kKappaTolerance = 0.005;
constexpr double kMapMargin = 0.2;
constexpr int kLabeledSentences = 100;
constexpr std::uint64_t kSeed = 2024;

struct Report {
  bool quiet = false;
  int passed = 0;
  int skipped = 0;
  std::vector<int> failed;

  void line(int id, const std::string& name, bool ok, const std::string& detail) {
    if (!quiet)
      std::cout << fmt::format("[{}] {:>2} {}: {}\n", ok ? "PASS" : "FAIL", id, name, detail)
              << std::flush;
    if (ok)
      ++passed;
    else
      failed.push_back(id);
  }
  void skip(int id, const std::string& name, const std::string& detail) {
    std::cout << fmt::format("[SKIP] {:>2} {}: {}\n", id, name, detail) << std::flush;
    ++skipped;
  }
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// ---------------------------------------------------------------------------

void gradient_check(Report& report) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 2 + static_cast<int>(rng() % 3);
    const int V = 5 + static_cast<int>(rng() % 46);
    const int R = 1 + static_cast<int>(rng() % 10);
    std::vector<std::string> names, words;
    std::vector<std::vector<double>> levels;
    for (int k = 0; k < K; ++k) {
      names.push_back(fmt::format("a{}", k));
      levels.emplace_back();
      const int L = 2 + static_cast<int>(rng() % 4);
      for (int v = 0; v < L; ++v) levels.back().push_back(v + 1.0);
    }
    for (int w = 0; w < V; ++w) words.push_back(fmt::format("w{:03d}", w));
    Corpus corpus;
    corpus.schema = make_schema(names, levels);
    corpus.vocabulary = Vocabulary(words);
    for (int r = 0; r < R; ++r) {
      Review review;
      review.review_id = fmt::format("r{}", r);
      for (int k = 0; k < K; ++k)
        review.ratings.push_back(static_cast<int>(rng() % levels[k].size()));
      const int n = 1 + static_cast<int>(rng() % 6);
      for (int s = 0; s < n; ++s) {
        Sentence sentence;
        const int len = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) sentence.tokens.push_back(static_cast<int>(rng() % V));
        review.sentences.push_back(sentence);
      }
      corpus.reviews.push_back(review);
    }
    const auto data = make_training_data(corpus);
    auto state = AssignmentState::unassigned(data);
    for (auto& l : state.labels) l = static_cast<int>(rng() % K);
    ModelParams params(corpus.schema, V);
    std::normal_distribution<double> g(0.0, 0.5);
    for (double& x : params.theta_data()) x = g(rng);
    for (double& x : params.phi_data()) x = g(rng);
    const double reg = 1e-3 * (1 + rng() % 100);
    const auto analytic = objective_gradient(params, data, state, reg);
    const auto numeric = oracle::numeric_gradient(params, data, state, reg, kFdStep);
    worst = std::max({worst, oracle::max_relative_error(analytic.theta_data(), numeric.theta_data()),
                      oracle::max_relative_error(analytic.phi_data(), numeric.phi_data())});
  }
  const double secs = seconds_since(t0);
  report.line(1, "gradient vs finite differences", worst < kGradientTolerance && secs < kGradientSeconds,
              fmt::format("max relative error {:.2e} (< {:.0e}) over 50 instances, {:.1f}s", worst,
                          kGradientTolerance, secs));
}

void matching_check(Report& report) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(kSeed + 1);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 6;
    const auto w = oracle::random_matrix(rng, n, n);
    const double expected = oracle::best_permutation_value(w);
    if (std::abs(kuhn_munkres(w).value - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
      ++mismatches;
  }
  const double secs = seconds_since(t0);
  report.line(2, "Kuhn-Munkres vs brute force", mismatches == 0 && secs < kMatchingSeconds,
              fmt::format("{} mismatches in 1000 matrices of size 2-7, {:.1f}s", mismatches, secs));
}

void diversity_check(Report& report) {
  std::mt19937_64 rng(kSeed + 2);
  int uncovered = 0, bad_summaries = 0, compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 2 + static_cast<int>(rng() % 4);
    const int V = 20;
    const int n = K + static_cast<int>(rng() % (8 - K));
    std::vector<std::string> names;
    for (int k = 0; k < K; ++k) names.push_back(fmt::format("a{}", k));
    const auto schema = make_schema(names, std::vector<double>{1, 2, 3});
    ModelParams params(schema, V);
    std::normal_distribution<double> g;
    for (double& x : params.theta_data()) x = g(rng);
    for (double& x : params.phi_data()) x = g(rng);
    Review review;
    for (int k = 0; k < K; ++k) review.ratings.push_back(static_cast<int>(rng() % 3));
    for (int s = 0; s < n; ++s) {
      Sentence sentence;
      const int len = 1 + static_cast<int>(rng() % 6);
      for (int i = 0; i < len; ++i) sentence.tokens.push_back(static_cast<int>(rng() % V));
      review.sentences.push_back(sentence);
    }
    const auto labels = segment_review(params, schema, review);
    if (oracle::distinct_aspects(labels, K) != K) ++uncovered;
    const auto picks = summarize_review(params, schema, review);
    const auto compat = compatibility_matrix(params, schema, review);
    double value = 0.0;
    for (int k = 0; k < K; ++k) value += compat(picks[k], k);
    const bool distinct = std::set<int>(picks.begin(), picks.end()).size() == picks.size();
    ++compared;
    if (!distinct || std::abs(value - oracle::best_injective_summary(compat)) > 1e-9) ++bad_summaries;
  }
  report.line(3, "diversity and summarization", uncovered == 0 && bad_summaries == 0,
              fmt::format("{} segmentations missing an aspect, {} of {} summaries off the "
                          "exhaustive optimum",
                          uncovered, bad_summaries, compared));
}

Corpus load_sample(const fs::path& data_dir) {
  const auto schema = load_schema((data_dir / "sample" / "schema.json").string());
  LoadOptions options;
  options.min_df = 1;
  auto corpus = load_corpus((data_dir / "sample" / "reviews.jsonl").string(), schema, options);
  corpus.labels = load_labels((data_dir / "sample" / "labels.tsv").string(), corpus);
  return corpus;
}

TrainConfig sample_config() {
  TrainConfig config;
  config.n_restarts = 8;
  config.seed = kSeed;
  return config;
}

void monotonicity_check(Report& report, const fs::path& data_dir) {
  const auto corpus = load_sample(data_dir);
  const auto result = train_unsupervised(corpus, sample_config());
  long steps = 0, decreases = 0;
  for (std::size_t i = 1; i < result.log.size(); ++i) {
    const auto& a = result.log[i - 1];
    const auto& b = result.log[i];
    if (a.restart != b.restart || a.outer != b.outer) continue;
    ++steps;
    if (b.objective < a.objective) ++decreases;
  }
  report.line(4, "coordinate-ascent monotonicity", decreases == 0 && steps > 0,
              fmt::format("{} decreases over {} accepted m_step iterations, 8 restarts, {} reviews",
                          decreases, steps, corpus.reviews.size()));
}

// The planted corpus shared by the recovery, supervision and ranking checks.
struct Planted {
  AspectSchema schema;
  SyntheticCorpus syn;
  int train_reviews = 1500;
};

Planted planted_corpus() {
  Planted p;
  p.schema = make_schema({"look", "smell", "taste"}, std::vector<double>{1, 2, 3, 4, 5});
  PlantedSpec spec;
  spec.content_words = 20;
  spec.sentiment_words = 4;
  spec.background_words = 180;
  spec.content_weight = 2.0;
  spec.sentiment_weight = 2.0;
  const auto model = make_planted_model(p.schema, spec);
  p.syn = generate_synthetic(p.schema, model, 2000, kSeed);
  return p;
}

std::vector<int> flat_truth(const TrainingData& data, const std::vector<std::vector<int>>& truth) {
  std::vector<int> out;
  for (int r : data.review_index) out.insert(out.end(), truth[r].begin(), truth[r].end());
  return out;
}

double heldout_accuracy(const ModelParams& params, const Planted& p) {
  AgreementCount count;
  for (int r = p.train_reviews; r < static_cast<int>(p.syn.corpus.reviews.size()); ++r)
    count.add(segment_review(params, p.schema, p.syn.corpus.reviews[r]), p.syn.true_labels[r]);
  return count.accuracy();
}

void recovery_check(Report& report, const Planted& p) {
  const auto t0 = Clock::now();
  TrainConfig config;
  config.n_restarts = 8;
  config.seed = kSeed;
  const auto result = train_unsupervised(p.syn.corpus, config);
  const double secs = seconds_since(t0);
  const double acc = oracle::permutation_matched_accuracy(
      result.state.labels, flat_truth(result.data, p.syn.true_labels), 3);
  report.line(5, "planted-model recovery", acc >= kRecoveryThreshold && secs < kRecoverySeconds,
              fmt::format("permutation-matched accuracy {:.4f} (>= {:.2f}), vocabulary {}, {:.1f}s",
                          acc, kRecoveryThreshold, p.syn.corpus.vocabulary.size(), secs));
}

struct SupervisionModels {
  ModelParams unsupervised, semi, supervised;
};

SupervisionModels supervision_check(Report& report, const Planted& p) {
  std::vector<int> train_idx(p.train_reviews);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  Corpus train = subset(p.syn.corpus, train_idx);
  std::vector<int> labeled;
  int sentences = 0;
  for (int r = 0; r < p.train_reviews && sentences < kLabeledSentences; ++r) {
    labeled.push_back(r);
    sentences += static_cast<int>(p.syn.true_labels[r].size());
  }
  train.labels = planted_labels(p.syn.corpus, p.syn.true_labels, labeled);
  // Trim the last review's labels so exactly kLabeledSentences are observed.
  train.labels.resize(kLabeledSentences);

  TrainConfig config;
  config.n_restarts = 8;
  config.seed = kSeed;
  Corpus unlabeled = train;
  unlabeled.labels.clear();
  SupervisionModels models{train_unsupervised(unlabeled, config).params,
                           train_semisupervised(train, config).params,
                           train_supervised(train, config).params};
  const double u = heldout_accuracy(models.unsupervised, p);
  const double s = heldout_accuracy(models.semi, p);
  const double f = heldout_accuracy(models.supervised, p);
  report.line(6, "supervision ordering", f >= s && s >= u,
              fmt::format("held-out accuracy supervised {:.4f}, semi {:.4f}, unsupervised {:.4f} "
                          "({} labeled sentences)",
                          f, s, u, kLabeledSentences));
  return models;
}

void rating_check(Report& report, const fs::path& work_dir, bool write_files) {
  const auto schema =
      make_schema({"look", "smell", "taste", "overall"}, std::vector<double>{1, 2, 3, 4, 5});
  PlantedSpec spec;
  spec.background_words = 100;
  spec.content_weight = 2.5;
  spec.sentiment_weight = 2.5;
  SyntheticOptions options;
  options.rating_correlation = 0.85;
  const auto syn = generate_synthetic(schema, make_planted_model(schema, spec), 2000, kSeed, options);

  // Pearson correlation of the planted ratings between every aspect pair.
  double min_corr = 1.0;
  const int K = schema.num_aspects();
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) {
      double mi = 0, mj = 0, n = static_cast<double>(syn.corpus.reviews.size());
      for (const auto& r : syn.corpus.reviews) mi += *r.ratings[i] / n, mj += *r.ratings[j] / n;
      double sij = 0, sii = 0, sjj = 0;
      for (const auto& r : syn.corpus.reviews) {
        const double a = *r.ratings[i] - mi, b = *r.ratings[j] - mj;
        sij += a * b, sii += a * a, sjj += b * b;
      }
      min_corr = std::min(min_corr, sij / std::sqrt(sii * sjj));
    }

  auto [train, test] = split(syn.corpus, 0.5, kSeed);
  TrainConfig seg_config;
  seg_config.n_restarts = 4;
  seg_config.seed = kSeed;
  const auto segmenter = train_unsupervised(train, seg_config).params;
  std::vector<std::vector<int>> train_labels, test_labels;
  for (const auto& r : train.reviews) train_labels.push_back(segment_review(segmenter, schema, r));
  for (const auto& r : test.reviews) test_labels.push_back(segment_review(segmenter, schema, r));
  std::vector<std::vector<std::optional<int>>> truth;
  for (const auto& r : test.reviews) truth.push_back(r.ratings);

  RatingTrainConfig config;
  config.seed = kSeed;
  std::map<Predictor, double> mse;
  for (auto predictor : {Predictor::Unsegmented, Predictor::Segmented, Predictor::Joint}) {
    const auto model = train_rating_model(train, train_labels, predictor, config);
    std::vector<std::vector<int>> predictions;
    for (std::size_t r = 0; r < test.reviews.size(); ++r)
      predictions.push_back(predict(model, test.reviews[r], test_labels[r]).levels);
    mse[predictor] = rating_mse(predictions, truth, schema);
    if (write_files)
      save_rating_model(model, (work_dir / fmt::format("rating_{}.json", predictor_name(predictor))).string(),
                        "acceptance");
  }
  if (!write_files) return;
  const double j = mse[Predictor::Joint], s = mse[Predictor::Segmented],
               u = mse[Predictor::Unsegmented];
  const bool ok = min_corr >= kMinRatingCorrelation && j <= (1 - kRatingMargin) * s &&
                  j <= (1 - kRatingMargin) * u;
  report.line(7, "rating predictor ordering", ok,
              fmt::format("MSE joint {:.4f}, segmented {:.4f} ({:+.1f}%), unsegmented {:.4f} "
                          "({:+.1f}%); min rating correlation {:.2f}",
                          j, s, 100 * (j - s) / s, u, 100 * (j - u) / u, min_corr));
}

void reduction_check(Report& report) {
  std::mt19937_64 rng(kSeed + 7);
  std::normal_distribution<double> g;
  int zero_alpha_mismatch = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int K = 2 + static_cast<int>(rng() % 4);
    const int V = 8;
    std::vector<int> levels;
    for (int k = 0; k < K; ++k) levels.push_back(2 + static_cast<int>(rng() % 4));
    RatingParams gamma(levels, V);
    for (double& x : gamma.data()) x = g(rng);
    Review review;
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<int> labels;
    for (int s = 0; s < n; ++s) {
      Sentence sentence;
      for (int i = 0; i < 3; ++i) sentence.tokens.push_back(static_cast<int>(rng() % V));
      review.sentences.push_back(sentence);
      labels.push_back(static_cast<int>(rng() % K));
    }
    if (predict_joint(gamma, PairwiseParams(levels), review, labels).levels !=
        predict_segmented(gamma, review, labels).levels)
      ++zero_alpha_mismatch;
  }
  int enum_mismatch = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<int> levels;
    std::uint64_t product = 1;
    const int K = 2 + static_cast<int>(rng() % 4);
    for (int k = 0; k < K; ++k) {
      int L = 2 + static_cast<int>(rng() % 9);
      while (product * L > 10000) --L;
      levels.push_back(L);
      product *= L;
    }
    std::vector<std::vector<double>> unary;
    for (int L : levels) {
      unary.emplace_back();
      for (int v = 0; v < L; ++v) unary.back().push_back(g(rng));
    }
    PairwiseParams alpha(levels);
    for (double& x : alpha.data()) x = g(rng);
    if (joint_argmax(unary, alpha) != oracle::enumerate_joint(unary, alpha)) ++enum_mismatch;
  }
  report.line(8, "exact joint reductions", zero_alpha_mismatch == 0 && enum_mismatch == 0,
              fmt::format("{} of 10000 zero-smoothness cases differ from segmented, {} of 1000 "
                          "cases differ from enumeration",
                          zero_alpha_mismatch, enum_mismatch));
}

void kappa_check(Report& report) {
  bool ok = true;
  for (int K = 2; K <= 6; ++K)
    ok = ok && std::abs(cohens_kappa(1.0, K) - 1.0) < 1e-12 &&
         std::abs(cohens_kappa(1.0 / K, K)) < 1e-12;
  const double kappa = cohens_kappa(0.944, 5);
  ok = ok && std::abs(kappa - 0.93) <= kKappaTolerance;
  report.line(9, "kappa", ok, fmt::format("kappa(0.944, 5) = {:.4f}; endpoints exact for K = 2..6", kappa));
}

double heldout_map(const ModelParams& params, const Planted& p, double* baseline) {
  std::vector<int> idx;
  for (int r = p.train_reviews; r < static_cast<int>(p.syn.corpus.reviews.size()); ++r) idx.push_back(r);
  const auto corpus = subset(p.syn.corpus, idx);
  std::vector<PrResult> results;
  double base = 0.0;
  for (int k = 0; k < 3; ++k) {
    const auto ranked = rank_sentences(params, corpus, k);
    std::vector<char> relevant;
    for (const auto& item : ranked) relevant.push_back(p.syn.true_labels[idx[item.review]][item.sentence] == k);
    base += static_cast<double>(std::count(relevant.begin(), relevant.end(), 1)) / relevant.size() / 3;
    results.push_back(pr_curve_and_map(relevant));
  }
  if (baseline) *baseline = base;
  return mean_average_precision(results);
}

void ranking_check(Report& report, const Planted& p, const ModelParams& unsupervised) {
  std::vector<int> train_idx(p.train_reviews);
  std::iota(train_idx.begin(), train_idx.end(), 0);
  Corpus train = subset(p.syn.corpus, train_idx);
  train.labels = planted_labels(p.syn.corpus, p.syn.true_labels, train_idx);
  TrainConfig config;
  config.seed = kSeed;
  const auto supervised = train_supervised(train, config).params;
  double baseline = 0.0;
  const double map_u = heldout_map(unsupervised, p, &baseline);
  const double map_s = heldout_map(supervised, p, nullptr);
  report.line(10, "ranking MAP", map_u - baseline >= kMapMargin && map_s >= map_u,
              fmt::format("MAP unsupervised {:.4f} vs random {:.4f}; supervised {:.4f}", map_u,
                          baseline, map_s));
}

void citysearch_check(Report& report) {
  const char* dir = std::getenv("MULTIASPECT_CITYSEARCH_DIR");
  if (!dir) {
    report.skip(11, "CitySearch reproduction", "MULTIASPECT_CITYSEARCH_DIR not set");
    return;
  }
  const fs::path root(dir);
  const auto schema = load_schema((root / "schema.json").string());
  LoadOptions options;
  options.min_df = 5;
  auto corpus = load_corpus((root / "reviews.jsonl").string(), schema, options);
  corpus.labels = load_labels((root / "labels.tsv").string(), corpus);
  // Labeled reviews only, split in half by review.
  std::set<std::string> ids;
  for (const auto& l : corpus.labels) ids.insert(l.review_id);
  std::vector<int> labeled;
  for (int r = 0; r < static_cast<int>(corpus.reviews.size()); ++r)
    if (ids.count(corpus.reviews[r].review_id)) labeled.push_back(r);
  const auto [train, test] = split(subset(corpus, labeled), 0.5, kSeed);
  TrainConfig config;
  config.seed = kSeed;
  const auto params = train_supervised(train, config).params;
  AgreementCount count;
  const auto table = test.label_table();
  for (std::size_t r = 0; r < test.reviews.size(); ++r)
    count.add(segment_review(params, schema, test.reviews[r]), table[r]);
  report.line(11, "CitySearch reproduction", count.accuracy() >= 0.84,
              fmt::format("supervised sentence accuracy {:.4f} (>= 0.84)", count.accuracy()));
}

void determinism_check(Report& report, const fs::path& data_dir, const fs::path& work_dir) {
  std::vector<std::string> mismatched;
  for (int run = 0; run < 2; ++run) {
    const auto dir = work_dir / fmt::format("run{}", run);
    fs::create_directories(dir);
    const auto corpus = load_sample(data_dir);
    const auto result = train_unsupervised(corpus, sample_config());
    const auto hash = config_hash(to_json(sample_config()));
    save_model({corpus.schema, corpus.vocabulary, result.params}, (dir / "model.json").string(), hash);
    write_training_log(result.log, (dir / "train_log.csv").string(), hash);
    EvalReport eval;
    eval.task = "segmentation";
    AgreementCount count;
    const auto table = corpus.label_table();
    for (std::size_t r = 0; r < corpus.reviews.size(); ++r)
      count.add(segment_review(result.params, corpus.schema, corpus.reviews[r]), table[r]);
    eval.accuracy = count.accuracy();
    eval.kappa = cohens_kappa(*eval.accuracy, corpus.num_aspects());
    eval.evaluated = count.total;
    auto j = to_json(eval);
    j["config_hash"] = hash;
    std::ofstream(dir / "report.json") << j.dump(2) << '\n';
    Report quiet{true};
    rating_check(quiet, dir, true);
  }
  for (const auto& entry : fs::directory_iterator(work_dir / "run0")) {
    const auto name = entry.path().filename();
    if (read_bytes(entry.path()) != read_bytes(work_dir / "run1" / name))
      mismatched.push_back(name.string());
  }
  report.line(12, "determinism", mismatched.empty(),
              mismatched.empty() ? "model, log, report and rating-model files byte-identical across reruns"
                                 : fmt::format("differing files: {}", fmt::join(mismatched, ", ")));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <data-dir> <work-dir> [known-red ids...]\n";
    return 1;
  }
  const fs::path data_dir(argv[1]);
  const fs::path work_dir(argv[2]);
  std::set<int> known_red;
  for (int i = 3; i < argc; ++i) known_red.insert(std::stoi(argv[i]));
  fs::remove_all(work_dir);
  fs::create_directories(work_dir);

  Report report;
  try {
    gradient_check(report);
    matching_check(report);
    diversity_check(report);
    monotonicity_check(report, data_dir);
    const auto planted = planted_corpus();
    recovery_check(report, planted);
    const auto models = supervision_check(report, planted);
    fs::create_directories(work_dir / "rating");
    rating_check(report, work_dir / "rating", true);
    reduction_check(report);
    kappa_check(report);
    ranking_check(report, planted, models.unsupervised);
    citysearch_check(report);
    determinism_check(report, data_dir, work_dir / "determinism");
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << '\n';
    return 2;
  }
  std::cout << fmt::format("{} passed, {} failed, {} skipped\n", report.passed,
                           report.failed.size(), report.skipped);
  bool regression = false;
  for (int id : report.failed) regression = regression || !known_red.count(id);
  if (!known_red.empty())
    std::cout << fmt::format("known red: {}\n", fmt::join(known_red, ", "));
  return regression ? 1 : 0;
}
