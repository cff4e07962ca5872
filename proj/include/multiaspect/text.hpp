#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace multiaspect {

/// A sentence before vocabulary lookup.
struct RawSentence {
  std::vector<std::string> words;
  std::string raw_text;
};

/// Split review text into sentences on '.', '!', '?' and newlines, then into
/// lowercase alphanumeric words. Sentences without words are dropped.
std::vector<RawSentence> tokenize(std::string_view text);

/// Words of a single, already delimited sentence.
std::vector<std::string> tokenize_words(std::string_view sentence);

}  // namespace multiaspect
