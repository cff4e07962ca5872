#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "multiaspect/learning.hpp"

namespace multiaspect {

enum class TrainMode { Unsupervised, Semi, Supervised };

std::string_view mode_name(TrainMode mode);
TrainMode parse_mode(std::string_view name);

/// Everything a CLI run needs. Relative paths resolve against the config file.
struct RunConfig {
  std::string schema_path;
  std::vector<std::string> corpus_paths;
  std::string label_path;
  TrainMode mode = TrainMode::Unsupervised;
  TrainConfig train;
  int min_df = 5;
  std::string output_dir = "out";

  /// Throws UsageError if a referenced file is missing or the mode's
  /// requirements are not met.
  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir = {});
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::string& path);

/// 16 hex digits of FNV-1a over the canonical JSON dump.
std::string config_hash(const nlohmann::json& canonical);

}  // namespace multiaspect
