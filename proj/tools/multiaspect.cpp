#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "multiaspect/assignment.hpp"
#include "multiaspect/config.hpp"
#include "multiaspect/corpus.hpp"
#include "multiaspect/errors.hpp"
#include "multiaspect/eval.hpp"
#include "multiaspect/learning.hpp"
#include "multiaspect/model.hpp"
#include "multiaspect/rating.hpp"
#include "multiaspect/synthetic.hpp"

namespace fs = std::filesystem;
using namespace multiaspect;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<int> relax;
  bool no_diversity = false;
  std::string mode;
  std::string predictor = "segmented";
};

std::ofstream open_output(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty())
    fs::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  return out;
}

void write_json(const json& j, const std::string& path) {
  auto out = open_output(path);
  out << j.dump(2) << '\n';
}

std::string command_hash(const std::string& command, json args) {
  args["command"] = command;
  return config_hash(args);
}

SegmentOptions segment_options(const Common& c) {
  SegmentOptions options;
  options.diversity = !c.no_diversity;
  options.relax = c.relax.value_or(0);
  if (options.relax < 0) throw UsageError("--relax must be non-negative");
  return options;
}

// Reviews of several files under one vocabulary.
Corpus load_corpora(const std::vector<std::string>& paths, const AspectSchema& schema,
                    int min_df, const std::optional<Vocabulary>& vocabulary = std::nullopt) {
  std::vector<RawReview> raw;
  for (const auto& path : paths) {
    auto part = read_raw_reviews(path, schema);
    raw.insert(raw.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  Vocabulary vocab = vocabulary ? *vocabulary : build_vocabulary(raw, min_df);
  return index_corpus(schema, raw, std::move(vocab));
}

std::vector<std::vector<int>> segment_all(const Model& model, const Corpus& corpus,
                                          const SegmentOptions& options) {
  std::vector<std::vector<int>> labels;
  for (const auto& review : corpus.reviews)
    labels.push_back(segment_review(model.params, model.schema, review, options));
  return labels;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& schema_path, const std::vector<std::string>& inputs, int min_df,
               const std::string& out_dir) {
  const auto schema = load_schema(schema_path);
  const auto corpus = load_corpora(inputs, schema, min_df);
  const auto hash = command_hash(
      "ingest", {{"schema", schema_to_json(schema)}, {"inputs", inputs}, {"min_df", min_df}});
  fs::create_directories(out_dir);
  save_corpus(corpus, (fs::path(out_dir) / "corpus.jsonl").string(), hash);
  auto vocab = open_output((fs::path(out_dir) / "vocabulary.tsv").string());
  vocab << "# config_hash=" << hash << '\n';
  for (int w = 0; w < corpus.vocabulary.size(); ++w)
    vocab << corpus.vocabulary.word(w) << '\t' << corpus.vocabulary.doc_freq(w) << '\n';
  fmt::print("ingested {} reviews, vocabulary {} words\n", corpus.reviews.size(),
             corpus.vocabulary.size());
  return 0;
}

struct TrainArgs {
  std::string schema;
  std::vector<std::string> corpus;
  std::string labels;
  std::string out;
  std::optional<int> restarts;
};

int cmd_train(const Common& common, const TrainArgs& args) {
  RunConfig config;
  if (!common.config.empty()) config = load_run_config(common.config);
  if (!args.schema.empty()) config.schema_path = args.schema;
  if (!args.corpus.empty()) config.corpus_paths = args.corpus;
  if (!args.labels.empty()) config.label_path = args.labels;
  if (!args.out.empty()) config.output_dir = args.out;
  if (!common.mode.empty()) config.mode = parse_mode(common.mode);
  if (common.seed) config.train.seed = *common.seed;
  if (common.threads) config.train.threads = *common.threads;
  if (common.relax) config.train.relax = *common.relax;
  if (common.no_diversity) config.train.diversity = false;
  if (args.restarts) config.train.n_restarts = *args.restarts;
  config.validate();

  const auto canonical = to_json(config);
  auto identity = canonical;
  identity.erase("output_dir");
  const auto hash = config_hash(identity);
  const auto schema = load_schema(config.schema_path);
  auto corpus = load_corpora(config.corpus_paths, schema, config.min_df);
  if (!config.label_path.empty()) corpus.labels = load_labels(config.label_path, corpus);

  TrainResult result;
  switch (config.mode) {
    case TrainMode::Unsupervised:
      result = train_unsupervised(corpus, config.train);
      break;
    case TrainMode::Semi:
      result = train_semisupervised(corpus, config.train);
      break;
    case TrainMode::Supervised:
      result = train_supervised(corpus, config.train);
      break;
  }
  for (const auto& w : result.warnings) fmt::print(stderr, "warning: {}\n", w);

  fs::create_directories(config.output_dir);
  const fs::path out(config.output_dir);
  save_model({schema, corpus.vocabulary, result.params}, (out / "model.json").string(), hash);
  json snapshot = canonical;
  snapshot["config_hash"] = hash;
  write_json(snapshot, (out / "config.json").string());
  write_training_log(result.log, (out / "train_log.csv").string(), hash);
  fmt::print("mode {}: objective {:.6f}, restart {}, {} m-steps; wrote {}\n", mode_name(config.mode),
             result.objective, result.best_restart, result.outer_iterations,
             (out / "model.json").string());
  return 0;
}

int cmd_segment(const Common& common, const std::string& model_path, const std::string& input,
                const std::string& output) {
  const auto model = load_model(model_path);
  const auto options = segment_options(common);
  const auto corpus = load_corpora({input}, model.schema, 1, model.vocabulary);
  const auto hash = command_hash("segment", {{"model", model_path},
                                             {"input", input},
                                             {"diversity", options.diversity},
                                             {"relax", options.relax}});
  std::ofstream file;
  if (!output.empty()) file = open_output(output);
  std::ostream& out = output.empty() ? std::cout : file;
  out << "# config_hash=" << hash << '\n';
  int failed = 0;
  for (const auto& review : corpus.reviews) {
    try {
      const auto labels = segment_review(model.params, model.schema, review, options);
      for (int s = 0; s < review.num_sentences(); ++s)
        out << review.review_id << '\t' << s << '\t' << model.schema.aspects[labels[s]] << '\n';
    } catch (const MissingRating& e) {
      ++failed;
      fmt::print(stderr, "review {}: {}\n", review.review_id, e.what());
    }
  }
  return failed > 0 && failed == static_cast<int>(corpus.reviews.size()) ? 2 : 0;
}

int cmd_summarize(const std::string& model_path, const std::string& input,
                  const std::string& output) {
  const auto model = load_model(model_path);
  const auto corpus = load_corpora({input}, model.schema, 1, model.vocabulary);
  const auto hash = command_hash("summarize", {{"model", model_path}, {"input", input}});
  std::ofstream file;
  if (!output.empty()) file = open_output(output);
  std::ostream& out = output.empty() ? std::cout : file;
  out << "# config_hash=" << hash << '\n';
  for (const auto& review : corpus.reviews) {
    try {
      const auto picks = summarize_review(model.params, model.schema, review);
      for (int k = 0; k < model.schema.num_aspects(); ++k)
        out << review.review_id << '\t' << model.schema.aspects[k] << '\t' << picks[k] << '\t'
            << review.sentences[picks[k]].raw_text << '\n';
    } catch (const DataError& e) {
      fmt::print(stderr, "review {}: {}\n", review.review_id, e.what());
    }
  }
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string rating_model;
  std::string fit;
  std::string input;
  std::string output;
  int epochs = 30;
  double reg_weight = 0.1;
};

int cmd_predict(const Common& common, const PredictArgs& args) {
  const auto predictor = parse_predictor(common.predictor);
  const bool segmented = predictor != Predictor::Unsegmented;
  if (args.rating_model.empty()) throw UsageError("predict needs --rating-model");
  if (args.fit.empty() && args.input.empty()) throw UsageError("predict needs --fit or --input");
  std::optional<Model> segmenter;
  if (!args.model.empty()) segmenter = load_model(args.model);
  const auto options = segment_options(common);

  RatingModel rating;
  if (!args.fit.empty()) {
    if (!segmenter && segmented)
      throw UsageError(fmt::format("predictor '{}' needs a segmentation --model",
                                   predictor_name(predictor)));
    if (!segmenter) throw UsageError("predict --fit needs --model for its schema and vocabulary");
    const auto corpus = load_corpora({args.fit}, segmenter->schema, 1, segmenter->vocabulary);
    RatingTrainConfig config;
    config.seed = common.seed.value_or(0);
    config.epochs = args.epochs;
    config.reg_weight = args.reg_weight;
    const auto labels = segmented ? segment_all(*segmenter, corpus, options)
                                  : std::vector<std::vector<int>>{};
    rating = train_rating_model(corpus, labels, predictor, config);
    const auto hash = command_hash("predict-fit", {{"model", args.model},
                                                   {"fit", args.fit},
                                                   {"predictor", common.predictor},
                                                   {"seed", config.seed},
                                                   {"epochs", config.epochs},
                                                   {"reg_weight", config.reg_weight}});
    save_rating_model(rating, args.rating_model, hash);
    fmt::print(stderr, "trained {} rating model on {} reviews\n", predictor_name(predictor),
               corpus.reviews.size());
  } else {
    rating = load_rating_model(args.rating_model);
  }
  if (args.input.empty()) return 0;

  const bool needs_labels = rating.predictor != Predictor::Unsegmented;
  if (needs_labels && !segmenter)
    throw UsageError("this rating model needs a segmentation --model");
  const auto corpus = load_corpora({args.input}, rating.schema, 1, rating.vocabulary);
  const auto hash = command_hash("predict", {{"model", args.model},
                                             {"rating_model", args.rating_model},
                                             {"input", args.input}});
  std::ofstream file;
  if (!args.output.empty()) file = open_output(args.output);
  std::ostream& out = args.output.empty() ? std::cout : file;
  for (const auto& review : corpus.reviews) {
    const auto labels = needs_labels
                            ? segment_review(segmenter->params, segmenter->schema, review, options)
                            : std::vector<int>{};
    const auto prediction = predict(rating, review, labels);
    json ratings = json::object();
    for (int k = 0; k < rating.schema.num_aspects(); ++k)
      ratings[rating.schema.aspects[k]] = rating.schema.level_value(k, prediction.levels[k]);
    out << json{{"review_id", review.review_id},
                {"ratings", ratings},
                {"predictor", std::string(predictor_name(prediction.predictor))},
                {"config_hash", hash}}
               .dump()
        << '\n';
  }
  return 0;
}

struct EvaluateArgs {
  std::string task = "segmentation";
  std::string model;
  std::string input;
  std::string labels;
  std::string predictions;
  std::string curve;
  std::string output;
};

std::vector<std::vector<std::optional<int>>> read_predictions(const std::string& path,
                                                              const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open predictions '{}'", path));
  std::vector<std::vector<std::optional<int>>> out(corpus.reviews.size());
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    try {
      const auto j = json::parse(text);
      const auto r = corpus.review_index(j.at("review_id").get<std::string>());
      if (!r) throw DataError(fmt::format("{}: line {}: unknown review", path, line));
      out[*r].assign(corpus.num_aspects(), std::nullopt);
      for (const auto& [name, value] : j.at("ratings").items()) {
        const auto k = corpus.schema.aspect_index(name);
        if (!k) throw DataError(fmt::format("{}: line {}: unknown aspect '{}'", path, line, name));
        const auto level = corpus.schema.level_index(*k, value.get<double>());
        if (!level) throw DataError(fmt::format("{}: line {}: invalid rating", path, line));
        out[*r][*k] = *level;
      }
    } catch (const json::exception& e) {
      throw DataError(fmt::format("{}: line {}: {}", path, line, e.what()));
    }
  }
  return out;
}

int cmd_evaluate(const Common& common, const EvaluateArgs& args) {
  if (args.input.empty()) throw UsageError("evaluate needs --input");
  EvalReport report;
  report.task = args.task;
  json hash_args = {{"task", args.task},       {"model", args.model},
                    {"input", args.input},     {"labels", args.labels},
                    {"predictions", args.predictions}};

  if (args.task == "segmentation" || args.task == "ranking") {
    if (args.model.empty() || args.labels.empty())
      throw UsageError(fmt::format("evaluate --task {} needs --model and --labels", args.task));
    const auto model = load_model(args.model);
    auto corpus = load_corpora({args.input}, model.schema, 1, model.vocabulary);
    corpus.labels = load_labels(args.labels, corpus);
    const auto table = corpus.label_table();
    const int K = model.schema.num_aspects();
    if (args.task == "segmentation") {
      const auto options = segment_options(common);
      hash_args["diversity"] = options.diversity;
      hash_args["relax"] = options.relax;
      AgreementCount total;
      std::vector<AgreementCount> per(K);
      for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
        const auto& row = table[r];
        if (std::none_of(row.begin(), row.end(), [](int l) { return l != kUnlabeled; })) continue;
        std::vector<int> predicted;
        try {
          predicted = segment_review(model.params, model.schema, corpus.reviews[r], options);
        } catch (const MissingRating&) {
          ++report.excluded_missing;
          continue;
        }
        for (std::size_t s = 0; s < row.size(); ++s) {
          if (row[s] == kUnlabeled) continue;
          if (row[s] == kAmbiguous) {
            ++report.excluded_ambiguous;
            continue;
          }
          const int p = predicted[s], t = row[s];
          total.add(std::span<const int>(&p, 1), std::span<const int>(&t, 1));
          per[t].add(std::span<const int>(&p, 1), std::span<const int>(&t, 1));
        }
      }
      report.accuracy = total.accuracy();
      report.kappa = cohens_kappa(*report.accuracy, K);
      report.evaluated = total.total;
      for (int k = 0; k < K; ++k)
        if (per[k].total > 0) report.per_aspect.emplace_back(model.schema.aspects[k], per[k].accuracy());
    } else {
      std::vector<PrResult> results;
      std::ofstream curve;
      if (!args.curve.empty()) {
        curve = open_output(args.curve);
        curve << "# config_hash=" << command_hash("evaluate", hash_args) << '\n';
        curve << "aspect,recall,precision\n";
      }
      for (int k = 0; k < K; ++k) {
        const auto ranked = rank_sentences(model.params, corpus, k);
        std::vector<char> relevant;
        for (const auto& item : ranked) {
          const int label = table[item.review][item.sentence];
          relevant.push_back(label == k);
        }
        results.push_back(pr_curve_and_map(relevant));
        report.per_aspect.emplace_back(model.schema.aspects[k], results.back().average_precision);
        if (curve.is_open())
          for (const auto& p : results.back().curve)
            curve << fmt::format("{},{:.6f},{:.6f}\n", model.schema.aspects[k], p.recall, p.precision);
        report.evaluated = static_cast<long>(ranked.size());
      }
      report.map = mean_average_precision(results);
    }
  } else if (args.task == "rating") {
    if (args.predictions.empty()) throw UsageError("evaluate --task rating needs --predictions");
    if (args.model.empty()) throw UsageError("evaluate --task rating needs --model for the schema");
    AspectSchema schema;
    Vocabulary vocabulary;
    try {
      const auto model = load_model(args.model);
      schema = model.schema;
      vocabulary = model.vocabulary;
    } catch (const DataError&) {
      const auto rating = load_rating_model(args.model);
      schema = rating.schema;
      vocabulary = rating.vocabulary;
    }
    const auto corpus = load_corpora({args.input}, schema, 1, vocabulary);
    const auto predicted = read_predictions(args.predictions, corpus);
    std::vector<std::vector<int>> preds;
    std::vector<std::vector<std::optional<int>>> truths;
    for (std::size_t r = 0; r < corpus.reviews.size(); ++r) {
      if (predicted[r].empty()) continue;
      std::vector<int> levels;
      bool complete = true;
      for (const auto& v : predicted[r]) {
        complete = complete && v.has_value();
        levels.push_back(v.value_or(0));
      }
      if (!complete) throw DataError("predictions must cover every aspect");
      preds.push_back(levels);
      truths.push_back(corpus.reviews[r].ratings);
      for (const auto& t : corpus.reviews[r].ratings) report.excluded_missing += !t.has_value();
    }
    report.mse = rating_mse(preds, truths, schema);
    report.evaluated = static_cast<long>(preds.size());
  } else {
    throw UsageError(fmt::format("unknown task '{}' (segmentation, ranking, rating)", args.task));
  }

  auto j = to_json(report);
  j["config_hash"] = command_hash("evaluate", hash_args);
  if (args.output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(j, args.output);
  }
  return 0;
}

int cmd_lexicon(const std::string& model_path, const std::string& aspect,
                std::optional<double> level, int top, const std::string& output) {
  const auto model = load_model(model_path);
  const auto k = model.schema.aspect_index(aspect);
  if (!k) throw UsageError(fmt::format("unknown aspect '{}'", aspect));
  std::optional<int> level_index;
  if (level) {
    level_index = model.schema.level_index(*k, *level);
    if (!level_index) throw UsageError(fmt::format("{} is not a rating level of '{}'", *level, aspect));
  }
  const auto words = top_words(model.params, model.vocabulary, *k, level_index, top);
  const auto hash = command_hash("lexicon", {{"model", model_path},
                                             {"aspect", aspect},
                                             {"level", level ? json(*level) : json()},
                                             {"top", top}});
  std::ofstream file;
  if (!output.empty()) file = open_output(output);
  std::ostream& out = output.empty() ? std::cout : file;
  out << "# config_hash=" << hash << '\n';
  for (std::size_t i = 0; i < words.size(); ++i)
    out << i + 1 << '\t' << words[i].word << '\t' << fmt::format("{:.6f}", words[i].weight) << '\n';
  return 0;
}

struct SynthArgs {
  std::string schema;
  std::string lexicon;
  std::string out = "synth";
  int reviews = 2000;
  double rating_correlation = 0.5;
  PlantedSpec spec;
};

int cmd_synth(const Common& common, const SynthArgs& args) {
  const auto schema = args.schema.empty()
                          ? make_schema({"look", "smell", "taste"}, std::vector<double>{1, 2, 3, 4, 5})
                          : load_schema(args.schema);
  PlantedModel planted;
  json lexicon;
  if (!args.lexicon.empty()) {
    std::ifstream in(args.lexicon);
    if (!in) throw UsageError(fmt::format("cannot open lexicon '{}'", args.lexicon));
    try {
      lexicon = json::parse(in);
    } catch (const json::exception& e) {
      throw DataError(fmt::format("{}: {}", args.lexicon, e.what()));
    }
    planted = planted_from_lexicon(schema, lexicon);
  } else {
    planted = make_planted_model(schema, args.spec);
  }
  SyntheticOptions options;
  options.rating_correlation = args.rating_correlation;
  const auto seed = common.seed.value_or(0);
  const auto syn = generate_synthetic(schema, planted, args.reviews, seed, options);

  const auto hash = command_hash(
      "synth", {{"schema", schema_to_json(schema)},
                {"lexicon", lexicon},
                {"reviews", args.reviews},
                {"seed", seed},
                {"rating_correlation", args.rating_correlation},
                {"content_words", args.spec.content_words},
                {"sentiment_words", args.spec.sentiment_words},
                {"background_words", args.spec.background_words},
                {"content_weight", args.spec.content_weight},
                {"sentiment_weight", args.spec.sentiment_weight}});
  fs::create_directories(args.out);
  const fs::path out(args.out);
  save_corpus(syn.corpus, (out / "reviews.jsonl").string(), hash);
  std::vector<int> all(syn.corpus.reviews.size());
  std::iota(all.begin(), all.end(), 0);
  save_labels(planted_labels(syn.corpus, syn.true_labels, all), schema,
              (out / "labels.tsv").string(), hash);
  auto schema_json = schema_to_json(schema);
  schema_json["config_hash"] = hash;
  write_json(schema_json, (out / "schema.json").string());
  fmt::print("wrote {} reviews to {}\n", syn.corpus.reviews.size(), args.out);
  return 0;
}

void add_common(CLI::App* cmd, Common& c, bool training) {
  cmd->add_option("--config", c.config, "Run configuration (JSON)");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--relax", c.relax, "Extra unconstrained aspect slots")->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-diversity", c.no_diversity, "Disable the aspect cover constraint");
  if (training)
    cmd->add_option("--mode", c.mode, "unsupervised, semi or supervised")
        ->check(CLI::IsMember({"unsupervised", "semi", "supervised"}));
  cmd->add_option("--predictor", c.predictor, "unsegmented, segmented or joint")
      ->check(CLI::IsMember({"unsegmented", "segmented", "joint"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sentence aspect segmentation, summarization and rating prediction"};
  app.require_subcommand(1);
  Common common;

  std::string schema_path, out_dir = "corpus";
  std::vector<std::string> inputs;
  int min_df = 5;
  auto* ingest = app.add_subcommand("ingest", "Tokenize reviews and build a vocabulary");
  ingest->add_option("--schema", schema_path, "Schema file")->required();
  ingest->add_option("--input", inputs, "Review file(s), JSON lines")->required();
  ingest->add_option("--min-df", min_df, "Minimum document frequency");
  ingest->add_option("--out", out_dir, "Output directory");

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "Train a segmentation model");
  add_common(train, common, true);
  train->add_option("--schema", train_args.schema, "Schema file");
  train->add_option("--corpus", train_args.corpus, "Review file(s)");
  train->add_option("--labels", train_args.labels, "Sentence label file (TSV)");
  train->add_option("--out", train_args.out, "Output directory");
  train->add_option("--restarts", train_args.restarts, "Random restarts");

  std::string model_path, input, output;
  auto* segment = app.add_subcommand("segment", "Label each sentence with an aspect");
  add_common(segment, common, false);
  segment->add_option("--model", model_path, "Model file")->required();
  segment->add_option("--input", input, "Review file")->required();
  segment->add_option("--out", output, "Output TSV (default stdout)");

  auto* summarize = app.add_subcommand("summarize", "Pick one sentence per aspect");
  add_common(summarize, common, false);
  summarize->add_option("--model", model_path, "Model file")->required();
  summarize->add_option("--input", input, "Review file")->required();
  summarize->add_option("--out", output, "Output TSV (default stdout)");

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Train or apply a rating predictor");
  add_common(predict_cmd, common, false);
  predict_cmd->add_option("--model", predict_args.model, "Segmentation model");
  predict_cmd->add_option("--rating-model", predict_args.rating_model, "Rating model file")->required();
  predict_cmd->add_option("--fit", predict_args.fit, "Train the rating model on this review file");
  predict_cmd->add_option("--input", predict_args.input, "Reviews to predict");
  predict_cmd->add_option("--out", predict_args.output, "Output JSON lines (default stdout)");
  predict_cmd->add_option("--epochs", predict_args.epochs, "Training epochs");
  predict_cmd->add_option("--reg-weight", predict_args.reg_weight, "Regularization weight");

  EvaluateArgs eval_args;
  auto* evaluate = app.add_subcommand("evaluate", "Score segmentation, ranking or ratings");
  add_common(evaluate, common, false);
  evaluate->add_option("--task", eval_args.task, "segmentation, ranking or rating")
      ->check(CLI::IsMember({"segmentation", "ranking", "rating"}));
  evaluate->add_option("--model", eval_args.model, "Segmentation (or rating) model");
  evaluate->add_option("--input", eval_args.input, "Review file");
  evaluate->add_option("--labels", eval_args.labels, "Sentence label file");
  evaluate->add_option("--predictions", eval_args.predictions, "Rating predictions (JSON lines)");
  evaluate->add_option("--curve", eval_args.curve, "Precision/recall CSV for ranking");
  evaluate->add_option("--out", eval_args.output, "Report file (default stdout)");

  std::string aspect;
  std::optional<double> level;
  int top = 20;
  auto* lexicon = app.add_subcommand("lexicon", "Top-weighted words of an aspect");
  lexicon->add_option("--model", model_path, "Model file")->required();
  lexicon->add_option("--aspect", aspect, "Aspect name")->required();
  lexicon->add_option("--level", level, "Rating level (sentiment weights)");
  lexicon->add_option("--top", top, "Number of words")->check(CLI::PositiveNumber);
  lexicon->add_option("--out", output, "Output TSV (default stdout)");

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Generate a planted synthetic corpus");
  add_common(synth, common, false);
  synth->add_option("--schema", synth_args.schema, "Schema file (default: look, smell, taste)");
  synth->add_option("--lexicon", synth_args.lexicon, "Hand-written planted lexicon (JSON)");
  synth->add_option("--reviews", synth_args.reviews, "Number of reviews")->check(CLI::NonNegativeNumber);
  synth->add_option("--rating-correlation", synth_args.rating_correlation, "Inter-aspect rating correlation");
  synth->add_option("--content-words", synth_args.spec.content_words, "Content words per aspect");
  synth->add_option("--sentiment-words", synth_args.spec.sentiment_words, "Sentiment words per level");
  synth->add_option("--background-words", synth_args.spec.background_words, "Background words");
  synth->add_option("--content-weight", synth_args.spec.content_weight, "Planted content weight");
  synth->add_option("--sentiment-weight", synth_args.spec.sentiment_weight, "Planted sentiment weight");
  synth->add_option("--out", synth_args.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*ingest) return cmd_ingest(schema_path, inputs, min_df, out_dir);
    if (*train) return cmd_train(common, train_args);
    if (*segment) return cmd_segment(common, model_path, input, output);
    if (*summarize) return cmd_summarize(model_path, input, output);
    if (*predict_cmd) return cmd_predict(common, predict_args);
    if (*evaluate) return cmd_evaluate(common, eval_args);
    if (*lexicon) return cmd_lexicon(model_path, aspect, level, top, output);
    if (*synth) return cmd_synth(common, synth_args);
  } catch (const UsageError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const DataError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}
