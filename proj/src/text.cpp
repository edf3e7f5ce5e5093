#include "mrgen/text.hpp"

#include <algorithm>
#include <cctype>

namespace mrgen {

namespace {

// '_' counts as a word character so delexicalization placeholders
// (slot_vow_cuisine_food) stay single tokens.
inline bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c == '_'; }

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }

// Length of the UTF-8 sequence starting at s[i]; 1 for ASCII and for any
// malformed byte.
std::size_t utf8_len(std::string_view s, std::size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  std::size_t n = 1;
  if ((c & 0xE0) == 0xC0)
    n = 2;
  else if ((c & 0xF0) == 0xE0)
    n = 3;
  else if ((c & 0xF8) == 0xF0)
    n = 4;
  if (i + n > s.size()) return 1;
  for (std::size_t k = 1; k < n; ++k)
    if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return 1;
  return n;
}

// The tokenizer treats multi-byte codepoints as word characters (accented
// letters stay inside tokens) except this punctuation set, which forms
// standalone tokens.
bool is_standalone_codepoint(std::string_view cp) {
  static const char* standalone[] = {
      "£" /* pound */, "€" /* euro */, "¥" /* yen */,
      "–" /* en dash */, "—" /* em dash */, "‘", "’",
      "“", "”", "«", "»", "…"};
  for (const char* s : standalone)
    if (cp == s) return true;
  return false;
}

}  // namespace

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_space_byte(c)) {
      ++i;
      continue;
    }
    std::size_t len = utf8_len(text, i);
    bool ascii = len == 1 && c < 0x80;
    if (ascii && !is_word_byte(c)) {
      // Single ASCII punctuation token.
      seq.tokens.push_back(to_lower(text.substr(i, 1)));
      seq.offsets.emplace_back(i, i + 1);
      ++i;
      continue;
    }
    if (!ascii && is_standalone_codepoint(text.substr(i, len))) {
      seq.tokens.push_back(std::string(text.substr(i, len)));
      seq.offsets.emplace_back(i, i + len);
      i += len;
      continue;
    }
    // Word token: alnum runs plus multi-byte letters; internal '-' and '\''
    // are kept when flanked by word characters.
    std::size_t start = i;
    while (i < n) {
      unsigned char b = static_cast<unsigned char>(text[i]);
      std::size_t blen = utf8_len(text, i);
      bool bascii = blen == 1 && b < 0x80;
      if (bascii && is_word_byte(b)) {
        ++i;
        continue;
      }
      if (!bascii && !is_standalone_codepoint(text.substr(i, blen))) {
        i += blen;
        continue;
      }
      if (bascii && (b == '-' || b == '\'') && i + 1 < n) {
        unsigned char next = static_cast<unsigned char>(text[i + 1]);
        std::size_t nlen = utf8_len(text, i + 1);
        bool next_word = (nlen == 1 && next < 0x80 && is_word_byte(next)) ||
                         (nlen > 1 && !is_standalone_codepoint(text.substr(i + 1, nlen)));
        if (next_word && i > start) {
          ++i;
          continue;
        }
      }
      break;
    }
    seq.tokens.push_back(to_lower(text.substr(start, i - start)));
    seq.offsets.emplace_back(start, i);
  }
  return seq;
}

std::string normalize_tokens(std::string_view text) { return tokenize(text).joined(); }

std::string normalize_ws(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // leading whitespace is dropped
  for (char ch : text) {
    if (is_space_byte(static_cast<unsigned char>(ch))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out += ' ';
      in_space = false;
      out += ch;
    }
  }
  return out;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> abbrevs = {
      "mr.",  "mrs.",  "ms.",  "dr.",   "st.",  "no.",  "etc.", "e.g.",
      "i.e.", "vs.",   "approx.", "ave.", "blvd.", "rd.", "jr.", "sr.",
      "prof.", "dept."};
  return abbrevs;
}

namespace {

std::vector<std::string> split_sentences_impl(std::string_view text,
                                              const std::vector<std::string>& abbreviations,
                                              bool require_capital) {
  std::string norm = normalize_ws(text);
  std::vector<std::string> sentences;
  if (norm.empty()) return sentences;

  const std::size_t n = norm.size();
  std::size_t start = 0;
  std::size_t i = 0;
  auto word_ending_at = [&](std::size_t end) {
    // Word including the terminal period, lowercased, for the guard list.
    std::size_t b = end;
    while (b > start && !is_space_byte(static_cast<unsigned char>(norm[b - 1]))) --b;
    return to_lower(std::string_view(norm).substr(b, end - b));
  };
  while (i < n) {
    char c = norm[i];
    if (c == '.' || c == '!' || c == '?') {
      // Swallow a terminal punctuation cluster ("?!", "...").
      std::size_t end = i + 1;
      while (end < n && (norm[end] == '.' || norm[end] == '!' || norm[end] == '?')) ++end;
      bool boundary = false;
      if (end < n && is_space_byte(static_cast<unsigned char>(norm[end]))) {
        std::size_t next = end;
        while (next < n && is_space_byte(static_cast<unsigned char>(norm[next]))) ++next;
        if (next < n) {
          unsigned char first = static_cast<unsigned char>(norm[next]);
          bool starts_ok = require_capital ? (std::isupper(first) != 0)
                                           : (std::isalpha(first) != 0 || first >= 0x80);
          if (starts_ok) boundary = true;
        }
      }
      if (boundary && norm[i] == '.' && end == i + 1) {
        std::string w = word_ending_at(end);
        for (const auto& a : abbreviations)
          if (w == a) {
            boundary = false;
            break;
          }
      }
      if (boundary) {
        sentences.emplace_back(norm.substr(start, end - start));
        i = end;
        while (i < n && is_space_byte(static_cast<unsigned char>(norm[i]))) ++i;
        start = i;
        continue;
      }
      i = end;
      continue;
    }
    ++i;
  }
  if (start < n) sentences.emplace_back(norm.substr(start));
  return sentences;
}

}  // namespace

std::vector<std::string> split_sentences(std::string_view text) {
  return split_sentences_impl(text, default_abbreviations(), true);
}

std::vector<std::string> split_sentences(std::string_view text,
                                         const std::vector<std::string>& abbreviations) {
  return split_sentences_impl(text, abbreviations, true);
}

std::vector<std::string> split_sentences_anycase(std::string_view text) {
  return split_sentences_impl(text, default_abbreviations(), false);
}

}  // namespace mrgen
