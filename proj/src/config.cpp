#include "multiaspect/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

namespace fs = std::filesystem;

std::string_view mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::Unsupervised:
      return "unsupervised";
    case TrainMode::Semi:
      return "semi";
    case TrainMode::Supervised:
      return "supervised";
  }
  return "unsupervised";
}

TrainMode parse_mode(std::string_view name) {
  if (name == "unsupervised") return TrainMode::Unsupervised;
  if (name == "semi" || name == "semisupervised") return TrainMode::Semi;
  if (name == "supervised") return TrainMode::Supervised;
  throw UsageError(fmt::format("unknown mode '{}' (unsupervised, semi, supervised)", name));
}

void RunConfig::validate() const {
  if (schema_path.empty()) throw UsageError("config: 'schema' is required");
  if (!fs::exists(schema_path)) throw UsageError(fmt::format("schema file '{}' not found", schema_path));
  if (corpus_paths.empty()) throw UsageError("config: 'corpus' is required");
  for (const auto& p : corpus_paths)
    if (!fs::exists(p)) throw UsageError(fmt::format("corpus file '{}' not found", p));
  if (mode != TrainMode::Unsupervised && label_path.empty())
    throw UsageError(fmt::format("mode '{}' needs a label file", mode_name(mode)));
  if (!label_path.empty() && !fs::exists(label_path))
    throw UsageError(fmt::format("label file '{}' not found", label_path));
  if (min_df < 1) throw UsageError("min_df must be at least 1");
  train.validate();
}

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  RunConfig c;
  try {
    c.schema_path = resolve(j.value("schema", std::string()), base_dir);
    if (j.contains("corpus")) {
      const auto& corpus = j.at("corpus");
      if (corpus.is_string()) {
        c.corpus_paths.push_back(resolve(corpus.get<std::string>(), base_dir));
      } else {
        for (const auto& p : corpus) c.corpus_paths.push_back(resolve(p.get<std::string>(), base_dir));
      }
    }
    c.label_path = resolve(j.value("labels", std::string()), base_dir);
    c.mode = parse_mode(j.value("mode", std::string("unsupervised")));
    c.min_df = j.value("min_df", c.min_df);
    c.output_dir = resolve(j.value("output_dir", c.output_dir), base_dir);
    c.train = train_config_from_json(j.value("train", nlohmann::json::object()));
    if (j.contains("seed")) c.train.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("config: {}", e.what()));
  }
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  return {{"schema", c.schema_path},
          {"corpus", c.corpus_paths},
          {"labels", c.label_path},
          {"mode", std::string(mode_name(c.mode))},
          {"min_df", c.min_df},
          {"output_dir", c.output_dir},
          {"train", to_json(c.train)}};
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError(fmt::format("cannot open config '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(fmt::format("{}: {}", path, e.what()));
  }
  return run_config_from_json(j, fs::path(path).parent_path().string());
}

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace multiaspect
