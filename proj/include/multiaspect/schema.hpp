#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace multiaspect {

/// The rated aspects of a review source, their permitted rating levels and
/// the seed words used to initialize aspect weights.
struct AspectSchema {
  std::vector<std::string> aspects;
  std::vector<std::vector<double>> rating_levels;  // per aspect, strictly increasing
  std::vector<std::vector<std::string>> seed_words;
  // Sentences carry their own rating (CitySearch-style corpora); φ is then
  // indexed by the sentence rating instead of the review's aspect rating.
  bool per_sentence_ratings = false;

  int num_aspects() const { return static_cast<int>(aspects.size()); }
  int num_levels(int aspect) const {
    return static_cast<int>(rating_levels.at(aspect).size());
  }

  /// Index of the named aspect, or nullopt.
  std::optional<int> aspect_index(std::string_view name) const;

  /// Index of `value` among the levels of `aspect` (exact up to 1e-9).
  std::optional<int> level_index(int aspect, double value) const;

  double level_value(int aspect, int level) const {
    return rating_levels.at(aspect).at(level);
  }

  /// Rating mapped to [0, 1] through the aspect's level range.
  double scaled_value(int aspect, int level) const;

  /// The aspect named "overall" (case-insensitive), if present.
  std::optional<int> overall_aspect() const;

  /// Throws DataError when an invariant is violated.
  void validate() const;
};

/// Build a schema with default seed words (the lowercased aspect names).
AspectSchema make_schema(std::vector<std::string> aspects,
                         std::vector<std::vector<double>> levels);

/// Same levels for every aspect.
AspectSchema make_schema(std::vector<std::string> aspects, std::vector<double> levels);

AspectSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const AspectSchema& schema);
AspectSchema load_schema(const std::string& path);
void save_schema(const AspectSchema& schema, const std::string& path);

}  // namespace multiaspect
