#include "d2t/data/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace d2t::data {
namespace {

constexpr std::string_view kLeftQuote = "\xE2\x80\x9C";
constexpr std::string_view kRightQuote = "\xE2\x80\x9D";

bool is_quote_token(std::string_view tok) {
  return tok == "\"" || tok == kLeftQuote || tok == kRightQuote || tok == "``" || tok == "''";
}

bool is_initial(std::string_view chunk) {
  return chunk.size() == 2 && std::isupper(static_cast<unsigned char>(chunk[0])) &&
         chunk[1] == '.';
}

// Length of a punctuation mark at the front of s (0 if none).
std::size_t leading_punct(std::string_view s) {
  if (s.starts_with(kLeftQuote) || s.starts_with(kRightQuote)) return kLeftQuote.size();
  if (s.starts_with("``")) return 2;
  static constexpr std::string_view kChars = "\"([{'";
  return !s.empty() && kChars.find(s.front()) != std::string_view::npos ? 1 : 0;
}

// Length of a punctuation mark at the back of s (0 if none).
std::size_t trailing_punct(std::string_view s) {
  if (s.ends_with(kLeftQuote) || s.ends_with(kRightQuote)) return kRightQuote.size();
  if (s.ends_with("''") && s.size() > 2) return 2;
  if (s.ends_with("'s") && s.size() > 2) return 2;
  static constexpr std::string_view kChars = "\",;:!?)]}'";
  if (!s.empty() && kChars.find(s.back()) != std::string_view::npos) return 1;
  if (s.ends_with(".") && !is_initial(s)) return 1;
  return 0;
}

void split_hyphens(std::string_view core, std::vector<std::string>& out) {
  if (is_number_token(core)) {
    out.emplace_back(core);
    return;
  }
  std::size_t i = 0;
  while (i < core.size()) {
    const bool hyphen = core[i] == '-';
    std::size_t j = i;
    while (j < core.size() && (core[j] == '-') == hyphen) ++j;
    out.emplace_back(core.substr(i, j - i));
    i = j;
  }
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::vector<std::string> front;
  while (std::size_t n = leading_punct(chunk)) {
    if (n >= chunk.size()) break;
    front.emplace_back(chunk.substr(0, n));
    chunk.remove_prefix(n);
  }
  std::vector<std::string> back;
  while (std::size_t n = trailing_punct(chunk)) {
    if (n >= chunk.size()) break;
    back.emplace_back(chunk.substr(chunk.size() - n));
    chunk.remove_suffix(n);
  }
  out.insert(out.end(), front.begin(), front.end());
  if (!chunk.empty()) split_hyphens(chunk, out);
  out.insert(out.end(), back.rbegin(), back.rend());
}

std::size_t find_game_notes(std::string_view text) {
  static constexpr std::string_view kHeading = "game notes";
  if (text.size() < kHeading.size()) return std::string_view::npos;
  for (std::size_t i = 0; i + kHeading.size() <= text.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < kHeading.size() && match; ++k) {
      match = std::tolower(static_cast<unsigned char>(text[i + k])) == kHeading[k];
    }
    if (match) return i;
  }
  return std::string_view::npos;
}

}  // namespace

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

bool is_number_token(std::string_view token) {
  if (token.starts_with("-")) token.remove_prefix(1);
  if (token.empty() || !std::isdigit(static_cast<unsigned char>(token.front()))) return false;
  bool dot = false;
  for (std::size_t i = 0; i < token.size(); ++i) {
    const char c = token[i];
    if (c == '.') {
      if (dot || i + 1 == token.size()) return false;
      dot = true;
    } else if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

bool is_sentence_end(std::string_view token) {
  return token == "." || token == "!" || token == "?";
}

std::vector<std::string> tokenize_summary(std::string_view text) {
  if (std::size_t cut = find_game_notes(text); cut != std::string_view::npos) {
    text = text.substr(0, cut);
  }
  std::vector<std::string> tokens;
  for (const std::string& chunk : split_whitespace(text)) tokenize_chunk(chunk, tokens);

  std::vector<std::string> out;
  std::vector<std::string> sentence;
  bool quoted = false;
  auto flush = [&]() {
    if (!quoted) out.insert(out.end(), sentence.begin(), sentence.end());
    sentence.clear();
    quoted = false;
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    quoted = quoted || is_quote_token(tokens[i]);
    const bool end = is_sentence_end(tokens[i]);
    sentence.push_back(std::move(tokens[i]));
    if (!end) continue;
    // A closing quote right after the terminator belongs to this sentence.
    while (i + 1 < tokens.size() && is_quote_token(tokens[i + 1])) {
      quoted = true;
      sentence.push_back(std::move(tokens[++i]));
    }
    flush();
  }
  flush();
  return out;
}

}  // namespace d2t::data
