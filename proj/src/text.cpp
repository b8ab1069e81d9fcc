#include "causalscore/text.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "causalscore/error.hpp"

namespace causalscore::text {
namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

constexpr std::array<std::string_view, 64> kStopwords = {
    "a",    "an",   "and",  "are",   "as",    "at",   "be",   "but",   "by",    "do",   "does",
    "for",  "from", "had",  "has",   "have",  "he",   "her",  "his",   "i",     "if",   "in",
    "is",   "it",   "its",  "me",    "my",    "no",   "not",  "of",    "oh",    "on",   "or",
    "our",  "so",   "she",  "that",  "the",   "their", "them", "then", "there", "they", "this",
    "to",   "too",  "was",  "we",    "were",  "what", "when", "which", "who",   "will", "with",
    "would", "yes", "you",  "your",  "am",    "can",  "just", "s",     "t"};

bool is_stopword(std::string_view w) {
  return std::find(kStopwords.begin(), kStopwords.end(), w) != kStopwords.end();
}

}  // namespace

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

std::string_view utf8_slice(std::string_view s, std::size_t start, std::size_t end) {
  if (start > end) throw PreconditionError("utf8_slice: start > end");
  std::size_t cp = 0;
  std::size_t begin_byte = std::string_view::npos;
  std::size_t end_byte = std::string_view::npos;
  for (std::size_t b = 0; b <= s.size(); ++b) {
    if (b < s.size() && is_continuation(static_cast<unsigned char>(s[b]))) continue;
    if (cp == start && begin_byte == std::string_view::npos) begin_byte = b;
    if (cp == end) {
      end_byte = b;
      break;
    }
    ++cp;
  }
  if (begin_byte == std::string_view::npos || end_byte == std::string_view::npos) {
    throw PreconditionError("utf8_slice: range [" + std::to_string(start) + "," + std::to_string(end) +
                            ") exceeds text length " + std::to_string(utf8_length(s)));
  }
  return s.substr(begin_byte, end_byte - begin_byte);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> whitespace_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> whitespace_token_ranges(std::string_view s) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t cp = 0;
  bool in_token = false;
  std::size_t token_start = 0;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_continuation(c)) continue;
    if (is_space(c)) {
      if (in_token) out.emplace_back(token_start, cp);
      in_token = false;
    } else if (!in_token) {
      in_token = true;
      token_start = cp;
    }
    ++cp;
  }
  if (in_token) out.emplace_back(token_start, cp);
  return out;
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> content_tokens(std::string_view s) {
  auto words = word_tokens(s);
  std::erase_if(words, [](const std::string& w) { return is_stopword(w); });
  return words;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("format_error", "cannot format double");
  return std::string(buf.data(), ptr);
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  if (needle.empty()) return 0;
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

}  // namespace causalscore::text
