#include "doctest.h"
#include "helpers.hpp"
#include "multiaspect/config.hpp"
#include "multiaspect/errors.hpp"

using namespace multiaspect;

TEST_CASE("run configs resolve paths and validate modes") {
  const auto dir = testing::temp_dir("config");
  testing::write_file(dir / "schema.json", "{}");
  testing::write_file(dir / "reviews.jsonl", "");
  testing::write_file(dir / "labels.tsv", "");
  const auto path = testing::write_file(dir / "run.json", R"({
    "schema": "schema.json", "corpus": "reviews.jsonl", "mode": "supervised",
    "seed": 5, "train": {"n_restarts": 8}})");
  auto config = load_run_config(path);
  CHECK(config.schema_path == (dir / "schema.json").string());
  CHECK(config.corpus_paths == std::vector<std::string>{(dir / "reviews.jsonl").string()});
  CHECK(config.train.seed == 5);
  CHECK(config.train.n_restarts == 8);
  CHECK_THROWS_AS(config.validate(), UsageError);
  config.label_path = (dir / "labels.tsv").string();
  CHECK_NOTHROW(config.validate());
  config.corpus_paths.push_back((dir / "missing.jsonl").string());
  CHECK_THROWS_AS(config.validate(), UsageError);
  CHECK_THROWS_AS(parse_mode("weak"), UsageError);
  CHECK(parse_mode("semi") == TrainMode::Semi);
}

TEST_CASE("config hash is stable and sensitive") {
  RunConfig a;
  a.schema_path = "s.json";
  const auto h = config_hash(to_json(a));
  CHECK(h.size() == 16);
  CHECK(h == config_hash(to_json(a)));
  a.train.seed = 1;
  CHECK(h != config_hash(to_json(a)));
  // FNV-1a of the empty JSON object "{}".
  CHECK(config_hash(nlohmann::json::object()) == "08f44b07b5901a25");
}
