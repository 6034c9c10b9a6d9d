#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clinichat::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::optional<size_t> find_ci(std::string_view haystack, std::string_view needle);

// Case-insensitive phrase search requiring non-alphanumeric characters (or
// string edges) on both sides, so "rash" does not match "crashing".
bool contains_word_ci(std::string_view haystack, std::string_view phrase);

std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Word counting rule used for every statistic and length cap in the pipeline:
// strip ASCII punctuation, then count whitespace-separated tokens.
long word_count(std::string_view s);

// Heuristic sentence splitter: terminator [.!?] followed by whitespace and an
// uppercase letter or digit, or end of text. Decimal points survive.
std::vector<std::string> split_sentences(std::string_view s);

uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

std::string format_double(double v, int decimals);

}  // namespace clinichat::text
