#include "multiaspect/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "multiaspect/errors.hpp"

namespace multiaspect {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::optional<int> AspectSchema::aspect_index(std::string_view name) const {
  for (int k = 0; k < num_aspects(); ++k)
    if (aspects[k] == name) return k;
  return std::nullopt;
}

std::optional<int> AspectSchema::level_index(int aspect, double value) const {
  const auto& levels = rating_levels.at(aspect);
  for (int v = 0; v < static_cast<int>(levels.size()); ++v)
    if (std::abs(levels[v] - value) <= 1e-9) return v;
  return std::nullopt;
}

double AspectSchema::scaled_value(int aspect, int level) const {
  const auto& levels = rating_levels.at(aspect);
  const double lo = levels.front();
  const double hi = levels.back();
  if (hi == lo) return 0.0;
  return (levels.at(level) - lo) / (hi - lo);
}

std::optional<int> AspectSchema::overall_aspect() const {
  for (int k = 0; k < num_aspects(); ++k)
    if (lowercase(aspects[k]) == "overall") return k;
  return std::nullopt;
}

void AspectSchema::validate() const {
  const int K = num_aspects();
  if (K < 1) throw DataError("schema: at least one aspect is required");
  if (static_cast<int>(rating_levels.size()) != K)
    throw DataError("schema: rating_levels must list levels for every aspect");
  if (static_cast<int>(seed_words.size()) != K)
    throw DataError("schema: seed_words must have one entry per aspect");
  for (int k = 0; k < K; ++k) {
    if (aspects[k].empty()) throw DataError("schema: empty aspect name");
    for (int j = 0; j < k; ++j)
      if (aspects[j] == aspects[k])
        throw DataError(fmt::format("schema: duplicate aspect '{}'", aspects[k]));
    const auto& levels = rating_levels[k];
    if (levels.empty())
      throw DataError(fmt::format("schema: aspect '{}' has no rating levels", aspects[k]));
    for (std::size_t v = 1; v < levels.size(); ++v)
      if (!(levels[v] > levels[v - 1]))
        throw DataError(
            fmt::format("schema: rating levels of '{}' must be strictly increasing", aspects[k]));
    for (const auto& w : seed_words[k])
      if (w.empty())
        throw DataError(fmt::format("schema: empty seed word for aspect '{}'", aspects[k]));
  }
  if (per_sentence_ratings)
    for (int k = 1; k < K; ++k)
      if (rating_levels[k] != rating_levels[0])
        throw DataError("schema: per-sentence ratings require identical levels for all aspects");
}

AspectSchema make_schema(std::vector<std::string> aspects,
                         std::vector<std::vector<double>> levels) {
  AspectSchema schema;
  schema.aspects = std::move(aspects);
  schema.rating_levels = std::move(levels);
  for (const auto& a : schema.aspects) schema.seed_words.push_back({lowercase(a)});
  schema.validate();
  return schema;
}

AspectSchema make_schema(std::vector<std::string> aspects, std::vector<double> levels) {
  std::vector<std::vector<double>> all(aspects.size(), levels);
  return make_schema(std::move(aspects), std::move(all));
}

AspectSchema schema_from_json(const nlohmann::json& j) {
  AspectSchema schema;
  try {
    schema.aspects = j.at("aspects").get<std::vector<std::string>>();
    const auto& levels = j.at("rating_levels");
    for (const auto& a : schema.aspects) {
      if (levels.is_array())
        schema.rating_levels.push_back(levels.get<std::vector<double>>());
      else
        schema.rating_levels.push_back(levels.at(a).get<std::vector<double>>());
    }
    const auto seeds = j.value("seed_words", nlohmann::json::object());
    for (const auto& a : schema.aspects) {
      if (seeds.contains(a))
        schema.seed_words.push_back(seeds.at(a).get<std::vector<std::string>>());
      else
        schema.seed_words.push_back({lowercase(a)});
    }
    schema.per_sentence_ratings = j.value("per_sentence_ratings", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("schema: {}", e.what()));
  }
  schema.validate();
  return schema;
}

nlohmann::json schema_to_json(const AspectSchema& schema) {
  nlohmann::json j;
  j["aspects"] = schema.aspects;
  j["rating_levels"] = nlohmann::json::object();
  j["seed_words"] = nlohmann::json::object();
  for (int k = 0; k < schema.num_aspects(); ++k) {
    j["rating_levels"][schema.aspects[k]] = schema.rating_levels[k];
    j["seed_words"][schema.aspects[k]] = schema.seed_words[k];
  }
  j["per_sentence_ratings"] = schema.per_sentence_ratings;
  return j;
}

AspectSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open schema file '{}'", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
  return schema_from_json(j);
}

void save_schema(const AspectSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path));
  out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace multiaspect
