#include "multiaspect/text.hpp"

namespace multiaspect {

namespace {

bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 belong to multi-byte UTF-8 sequences and stay inside words.
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?' || c == '\n'; }

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> tokenize_words(std::string_view sentence) {
  std::vector<std::string> words;
  std::string current;
  for (const char ch : sentence) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::vector<RawSentence> tokenize(std::string_view text) {
  std::vector<RawSentence> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i < text.size() && !is_sentence_end(text[i])) continue;
    const auto piece = text.substr(start, i - start);
    auto words = tokenize_words(piece);
    if (!words.empty()) sentences.push_back({std::move(words), std::string(trim(piece))});
    start = i + 1;
  }
  return sentences;
}

}  // namespace multiaspect
