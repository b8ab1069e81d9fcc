#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causalscore::text {

// Character offsets throughout the library are Unicode code points of the
// UTF-8 text, not bytes.
std::size_t utf8_length(std::string_view s);

// Code-point range [start, end) of `s`. Throws PreconditionError when the
// range runs past the end of the text.
std::string_view utf8_slice(std::string_view s, std::size_t start, std::size_t end);

std::string_view trim(std::string_view s);

std::vector<std::string_view> whitespace_tokens(std::string_view s);

// Code-point ranges [start, end) of each whitespace token, in order.
std::vector<std::pair<std::size_t, std::size_t>> whitespace_token_ranges(std::string_view s);

// Lowercased alphanumeric tokens minus a small English stopword list. Bytes
// >= 0x80 are treated as word characters so non-ASCII words survive intact.
std::vector<std::string> content_tokens(std::string_view s);

// Lowercased alphanumeric tokens, stopwords kept.
std::vector<std::string> word_tokens(std::string_view s);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

std::size_t count_occurrences(std::string_view haystack, std::string_view needle);

}  // namespace causalscore::text
