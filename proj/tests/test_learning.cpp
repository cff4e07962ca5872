#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "multiaspect/errors.hpp"
#include "multiaspect/learning.hpp"
#include "multiaspect/synthetic.hpp"
#include "oracles.hpp"

using namespace multiaspect;

namespace {

AssignmentState random_state(const TrainingData& data, int K, std::mt19937_64& rng) {
  auto state = AssignmentState::unassigned(data);
  for (auto& l : state.labels) l = static_cast<int>(rng() % K);
  return state;
}

SyntheticCorpus small_planted(std::uint64_t seed, int reviews = 150) {
  const auto schema = make_schema({"look", "smell", "taste"}, std::vector<double>{1, 2, 3});
  PlantedSpec spec;
  spec.content_words = 8;
  spec.sentiment_words = 2;
  spec.background_words = 20;
  return generate_synthetic(schema, make_planted_model(schema, spec), reviews, seed);
}

}  // namespace

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int K = 2 + trial % 3;
    std::vector<int> levels;
    for (int k = 0; k < K; ++k) levels.push_back(2 + static_cast<int>(rng() % 3));
    std::vector<std::vector<double>> level_values;
    for (int L : levels) {
      level_values.emplace_back();
      for (int v = 0; v < L; ++v) level_values.back().push_back(v + 1.0);
    }
    std::vector<std::string> names;
    for (int k = 0; k < K; ++k) names.push_back("a" + std::to_string(k));
    const auto schema = make_schema(names, level_values);
    const auto corpus = testing::random_corpus(schema, 12, 4, 1, 4, rng);
    const auto data = make_training_data(corpus);
    const auto state = random_state(data, K, rng);
    const auto params = testing::random_params(levels, 12, rng, 0.5);
    const auto analytic = objective_gradient(params, data, state, 0.01);
    const auto numeric = oracle::numeric_gradient(params, data, state, 0.01);
    CHECK(oracle::max_relative_error(analytic.theta_data(), numeric.theta_data()) < 1e-4);
    CHECK(oracle::max_relative_error(analytic.phi_data(), numeric.phi_data()) < 1e-4);
  }
}

TEST_CASE("objective is the normalized log-likelihood minus the penalty") {
  std::mt19937_64 rng(5);
  const auto schema = make_schema({"a", "b"}, std::vector<double>{1, 2});
  const auto corpus = testing::random_corpus(schema, 6, 3, 2, 3, rng);
  const auto data = make_training_data(corpus);
  const auto state = random_state(data, 2, rng);
  const auto params = testing::random_params({2, 2}, 6, rng);
  double ll = 0.0;
  std::size_t words = 0;
  std::vector<std::vector<int>> labels;
  int s = 0;
  for (const auto& r : corpus.reviews) {
    labels.emplace_back();
    for (const auto& sentence : r.sentences) {
      labels.back().push_back(state.labels[s++]);
      words += sentence.tokens.size();
    }
  }
  ll = corpus_log_likelihood(params, corpus, labels);
  const auto o = objective(params, data, state, 0.1);
  CHECK(o.log_likelihood == doctest::Approx(ll));
  CHECK(o.normalizer == words);
  CHECK(o.value == doctest::Approx(ll / words - 0.1 * params.squared_norm()));
}

TEST_CASE("m_step increases the objective monotonically and keeps the gauge") {
  const auto syn = small_planted(3, 40);
  const auto data = make_training_data(syn.corpus);
  std::mt19937_64 rng(1);
  const auto state = random_state(data, 3, rng);
  TrainConfig config;
  auto params = init_params(syn.corpus.schema, syn.corpus.vocabulary, rng);
  MStepTrace trace;
  const auto before = objective(params, data, state, config.reg_weight).value;
  params = m_step(params, data, state, config, &trace);
  REQUIRE(trace.objectives.size() >= 2);
  CHECK(trace.objectives.front() == doctest::Approx(before));
  for (std::size_t i = 1; i < trace.objectives.size(); ++i)
    CHECK(trace.objectives[i] >= trace.objectives[i - 1]);
  CHECK(objective(params, data, state, config.reg_weight).value ==
        doctest::Approx(trace.objectives.back()));
  for (int k = 0; k < params.num_aspects(); ++k)
    for (int w = 0; w < params.vocab_size(); ++w) {
      double sum = 0.0;
      for (int v = 0; v < params.num_levels(k); ++v) sum += params.phi(k, v, w);
      CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("heavy regularization drives probabilities to uniform") {
  const auto syn = small_planted(4, 20);
  const auto data = make_training_data(syn.corpus);
  std::mt19937_64 rng(2);
  const auto state = random_state(data, 3, rng);
  TrainConfig config;
  config.reg_weight = 1e3;
  config.initial_step = 1e-4;
  config.max_mstep_iters = 500;
  auto params = m_step(init_params(syn.corpus.schema, syn.corpus.vocabulary, rng), data, state,
                       config);
  for (int s = 0; s < 10; ++s) {
    std::vector<double> c(3);
    sentence_scores(params, data, s, c);
    for (double p : softmax(c)) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-3));
  }
}

TEST_CASE("e_step leaves observed labels alone") {
  const auto syn = small_planted(5, 30);
  const auto data = make_training_data(syn.corpus);
  std::mt19937_64 rng(3);
  auto state = random_state(data, 3, rng);
  for (int s = 0; s < data.num_sentences(); s += 3) {
    state.observed[s] = 1;
    state.labels[s] = 2;
  }
  const auto params = testing::random_params({3, 3, 3}, syn.corpus.vocabulary.size(), rng);
  e_step(params, data, state, {});
  for (int s = 0; s < data.num_sentences(); s += 3) CHECK(state.labels[s] == 2);
  auto again = state;
  CHECK(e_step(params, data, again, {}) == 0);
}

TEST_CASE("unsupervised training is deterministic and recovers planted aspects") {
  const auto syn = small_planted(6, 200);
  TrainConfig config;
  config.n_restarts = 3;
  config.seed = 9;
  const auto a = train_unsupervised(syn.corpus, config);
  config.threads = 2;
  const auto b = train_unsupervised(syn.corpus, config);
  CHECK(a.params == b.params);
  CHECK(a.state.labels == b.state.labels);
  std::vector<int> truth;
  for (int r : a.data.review_index)
    truth.insert(truth.end(), syn.true_labels[r].begin(), syn.true_labels[r].end());
  CHECK(oracle::permutation_matched_accuracy(a.state.labels, truth, 3) > 0.8);
  for (std::size_t i = 1; i < a.log.size(); ++i)
    if (a.log[i].restart == a.log[i - 1].restart && a.log[i].outer == a.log[i - 1].outer)
      CHECK(a.log[i].objective >= a.log[i - 1].objective);
}

TEST_CASE("semi-supervised training clamps labels and reduces to unsupervised without them") {
  auto syn = small_planted(7, 120);
  TrainConfig config;
  config.n_restarts = 2;
  const auto plain = train_unsupervised(syn.corpus, config);
  const auto same = train_semisupervised(syn.corpus, config);
  CHECK(plain.params == same.params);

  std::vector<int> first{0, 1, 2, 3, 4};
  syn.corpus.labels = planted_labels(syn.corpus, syn.true_labels, first);
  const auto semi = train_semisupervised(syn.corpus, config);
  int s = 0;
  for (int i = 0; i < semi.data.num_reviews(); ++i) {
    const int r = semi.data.review_index[i];
    for (int j = 0; j < static_cast<int>(syn.true_labels[r].size()); ++j, ++s)
      if (r < 5) CHECK(semi.state.labels[s] == syn.true_labels[r][j]);
  }
}

TEST_CASE("supervised training needs labels and fits them") {
  auto syn = small_planted(8, 120);
  TrainConfig config;
  CHECK_THROWS_AS(train_supervised(syn.corpus, config), DataError);
  std::vector<int> labeled(60);
  std::iota(labeled.begin(), labeled.end(), 0);
  syn.corpus.labels = planted_labels(syn.corpus, syn.true_labels, labeled);
  const auto result = train_supervised(syn.corpus, config);
  const auto hinge = structured_hinge(result.params, syn.corpus, config.segment_options());
  CHECK(hinge.loss < 0.3);
  CHECK(hinge.hinge >= hinge.loss - 1e-12);
}

TEST_CASE("structured hinge upper-bounds the segmentation loss") {
  auto syn = small_planted(10, 40);
  std::vector<int> all(40);
  std::iota(all.begin(), all.end(), 0);
  syn.corpus.labels = planted_labels(syn.corpus, syn.true_labels, all);
  syn.corpus.labels[0].label = (syn.corpus.labels[0].label + 1) % 3;
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto params = testing::random_params({3, 3, 3}, syn.corpus.vocabulary.size(), rng);
    const auto h = structured_hinge(params, syn.corpus, {});
    CHECK(h.hinge >= h.loss - 1e-12);
  }
}

TEST_CASE("loss-augmented labels maximize score plus Hamming loss") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int K = 3, n = 3 + static_cast<int>(rng() % 3);
    const auto compat = oracle::random_matrix(rng, n, K, -1, 1);
    std::vector<int> truth(n);
    for (auto& t : truth) t = static_cast<int>(rng() % K);
    Matrix augmented = compat;
    for (int s = 0; s < n; ++s)
      for (int k = 0; k < K; ++k)
        if (k != truth[s]) augmented(s, k) += 1.0 / n;
    const auto y = loss_augmented_labels(compat, truth, {});
    CHECK(oracle::labeling_value(augmented, y) ==
          doctest::Approx(*oracle::best_feasible_labeling(augmented, K)));
  }
}

TEST_CASE("training config validation and json round trip") {
  TrainConfig c;
  c.n_restarts = 8;
  c.relax = 1;
  c.seed = 77;
  const auto back = train_config_from_json(to_json(c));
  CHECK(back.n_restarts == 8);
  CHECK(back.relax == 1);
  CHECK(back.seed == 77);
  CHECK_THROWS_AS(train_config_from_json({{"reg_weight", -1.0}}), UsageError);
  CHECK_THROWS_AS(train_config_from_json({{"n_restarts", "many"}}), UsageError);
}
