#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace qvar {

// Classic Porter (1980) stemmer. Input must already be lowercase ASCII;
// bytes outside [a-z] are passed through untouched by the suffix rules.
std::string porter_stem(std::string_view word);

// The 33-word Lucene English default stop list, embedded so the analyzer and
// the normalization cascade share one pinned list.
const std::vector<std::string>& stop_words();
bool is_stop_word(std::string_view token);

// Stop words after Porter stemming ("this" -> "thi"), for filtering token
// streams that have already been stemmed.
const std::unordered_set<std::string>& stemmed_stop_words();

// Fingerprint of the analyzer configuration (stemmer id + stop list),
// embedded in persisted indexes.
std::uint64_t analyzer_fingerprint();

std::string to_lower_ascii(std::string_view s);

// True for codepoints in the common Unicode punctuation and symbol blocks.
bool is_punct_or_symbol(char32_t cp);

// Removes punctuation/symbol codepoints and re-collapses whitespace.
// Invalid UTF-8 bytes are kept as-is.
std::string strip_punctuation(std::string_view s);

// Index analyzer: lowercase, split on non-alphanumeric, drop stop words,
// Porter-stem. Mirrors the Lucene/Anserini English defaults.
std::vector<std::string> analyze(std::string_view text);

}  // namespace qvar
