#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mrgen {

// Lowercased tokens plus character spans into the source string. Offsets are
// strictly increasing and non-overlapping, so slicing the source with them
// recovers the original surface form of every token.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> offsets;  // [start, end)

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::string joined() const;
};

// Lowercases tokens; splits punctuation into separate tokens; keeps internal
// hyphens and apostrophes ("kid-friendly", "o'clock"). Multi-byte UTF-8
// punctuation (currency signs, dashes, quotes) becomes a single token.
TokenSequence tokenize(std::string_view text);

// Normal form used throughout for phrase matching: lowercased tokens joined
// by single spaces.
std::string normalize_tokens(std::string_view text);

// Trims and collapses runs of whitespace to single spaces.
std::string normalize_ws(std::string_view text);

// Default abbreviation guard list for sentence splitting; editable copies
// ship under data/. Entries include the trailing period.
const std::vector<std::string>& default_abbreviations();

// Splits on terminal punctuation followed by whitespace and a capital letter,
// guarded by the abbreviation list. Joining the result with single spaces
// yields normalize_ws(text). Non-empty input always gives >= 1 sentence.
std::vector<std::string> split_sentences(std::string_view text);
std::vector<std::string> split_sentences(std::string_view text,
                                         const std::vector<std::string>& abbreviations);

// Case-insensitive variant (boundary may be followed by any letter); used by
// the stylistic profiler so its counts do not depend on letter case.
std::vector<std::string> split_sentences_anycase(std::string_view text);

std::string to_lower(std::string_view text);

}  // namespace mrgen
