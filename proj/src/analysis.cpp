#include "qvar/analysis.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "qvar/util.hpp"

namespace qvar {

namespace {

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// 'y' is a consonant at position 0 or after a vowel, a vowel after a consonant.
bool cons(const std::string& w, std::size_t i) {
  char c = w[i];
  if (is_vowel_letter(c)) return false;
  if (c == 'y') return i == 0 ? true : !cons(w, i - 1);
  return true;
}

// Number of VC sequences in w[0..len), the m of [C](VC)^m[V].
int measure(const std::string& w, std::size_t len) {
  int m = 0;
  std::size_t i = 0;
  while (i < len && cons(w, i)) ++i;
  while (i < len) {
    while (i < len && !cons(w, i)) ++i;
    if (i >= len) break;
    ++m;
    while (i < len && cons(w, i)) ++i;
  }
  return m;
}

bool has_vowel(const std::string& w, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i)
    if (!cons(w, i)) return true;
  return false;
}

bool double_cons(const std::string& w) {
  std::size_t n = w.size();
  return n >= 2 && w[n - 1] == w[n - 2] && cons(w, n - 1);
}

// *o: w[0..len) ends consonant-vowel-consonant, final consonant not w, x, y.
bool cvc_end(const std::string& w, std::size_t len) {
  if (len < 3) return false;
  if (!cons(w, len - 3) || cons(w, len - 2) || !cons(w, len - 1)) return false;
  char c = w[len - 1];
  return c != 'w' && c != 'x' && c != 'y';
}

bool ends(const std::string& w, std::string_view s) {
  return w.size() >= s.size() &&
         w.compare(w.size() - s.size(), s.size(), s) == 0;
}

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Longest matching suffix decides; the rule fires only if m(stem) > min_m.
void apply_rules(std::string& w, std::initializer_list<Rule> rules, int min_m) {
  const Rule* best = nullptr;
  for (const Rule& r : rules) {
    if (ends(w, r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
      best = &r;
  }
  if (!best) return;
  std::size_t stem_len = w.size() - best->suffix.size();
  if (measure(w, stem_len) > min_m) {
    w.resize(stem_len);
    w.append(best->replacement);
  }
}

void step1a(std::string& w) {
  if (ends(w, "sses")) {
    w.resize(w.size() - 2);
  } else if (ends(w, "ies")) {
    w.resize(w.size() - 2);
  } else if (ends(w, "ss")) {
    // no-op
  } else if (ends(w, "s")) {
    w.resize(w.size() - 1);
  }
}

void step1b(std::string& w) {
  if (ends(w, "eed")) {
    if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
    return;
  }
  bool removed = false;
  if (ends(w, "ed") && has_vowel(w, w.size() - 2)) {
    w.resize(w.size() - 2);
    removed = true;
  } else if (ends(w, "ing") && has_vowel(w, w.size() - 3)) {
    w.resize(w.size() - 3);
    removed = true;
  }
  if (!removed) return;
  if (ends(w, "at") || ends(w, "bl") || ends(w, "iz")) {
    w.push_back('e');
  } else if (double_cons(w) && !ends(w, "l") && !ends(w, "s") && !ends(w, "z")) {
    w.resize(w.size() - 1);
  } else if (measure(w, w.size()) == 1 && cvc_end(w, w.size())) {
    w.push_back('e');
  }
}

void step1c(std::string& w) {
  if (ends(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';
}

void step2(std::string& w) {
  apply_rules(w,
              {{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
               {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
               {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
               {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
               {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
               {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
               {"iviti", "ive"},   {"biliti", "ble"}},
              0);
}

void step3(std::string& w) {
  apply_rules(w,
              {{"icate", "ic"}, {"ative", ""}, {"alize", "al"},
               {"iciti", "ic"}, {"ical", "ic"}, {"ful", ""}, {"ness", ""}},
              0);
}

void step4(std::string& w) {
  // "ion" additionally requires the stem to end in s or t.
  const Rule* best = nullptr;
  static constexpr std::array<Rule, 19> rules{{{"ement", ""}, {"ance", ""},
                                               {"ence", ""},  {"able", ""},
                                               {"ible", ""},  {"ment", ""},
                                               {"ant", ""},   {"ent", ""},
                                               {"ion", ""},   {"ism", ""},
                                               {"ate", ""},   {"iti", ""},
                                               {"ous", ""},   {"ive", ""},
                                               {"ize", ""},   {"al", ""},
                                               {"er", ""},    {"ic", ""},
                                               {"ou", ""}}};
  for (const Rule& r : rules) {
    if (ends(w, r.suffix) && (!best || r.suffix.size() > best->suffix.size()))
      best = &r;
  }
  if (!best) return;
  std::size_t stem_len = w.size() - best->suffix.size();
  if (measure(w, stem_len) <= 1) return;
  if (best->suffix == "ion" && stem_len > 0 && w[stem_len - 1] != 's' &&
      w[stem_len - 1] != 't')
    return;
  w.resize(stem_len);
}

void step5a(std::string& w) {
  if (!ends(w, "e")) return;
  int m = measure(w, w.size() - 1);
  if (m > 1 || (m == 1 && !cvc_end(w, w.size() - 1))) w.resize(w.size() - 1);
}

void step5b(std::string& w) {
  if (measure(w, w.size()) > 1 && double_cons(w) && ends(w, "l"))
    w.resize(w.size() - 1);
}

}  // namespace

std::string porter_stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 2) return w;
  for (char c : w)
    if (c < 'a' || c > 'z') return w;
  step1a(w);
  step1b(w);
  step1c(w);
  step2(w);
  step3(w);
  step4(w);
  step5a(w);
  step5b(w);
  return w;
}

const std::vector<std::string>& stop_words() {
  static const std::vector<std::string> words{
      "a",    "an",   "and",   "are",   "as",    "at",   "be",   "but",
      "by",   "for",  "if",    "in",    "into",  "is",   "it",   "no",
      "not",  "of",   "on",    "or",    "such",  "that", "the",  "their",
      "then", "there", "these", "they",  "this",  "to",   "was",  "will",
      "with"};
  return words;
}

bool is_stop_word(std::string_view token) {
  static const std::unordered_set<std::string> set(stop_words().begin(),
                                                   stop_words().end());
  return set.contains(std::string(token));
}

const std::unordered_set<std::string>& stemmed_stop_words() {
  static const std::unordered_set<std::string> set = [] {
    std::unordered_set<std::string> s;
    for (const auto& w : stop_words()) s.insert(porter_stem(w));
    return s;
  }();
  return set;
}

std::uint64_t analyzer_fingerprint() {
  std::uint64_t h = fnv1a("porter1/lowercase/alnum-split");
  for (const auto& w : stop_words()) {
    h = fnv1a(w, h);
    h = fnv1a(",", h);
  }
  return h;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

bool is_punct_or_symbol(char32_t cp) {
  auto in = [cp](char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; };
  if (in(0x21, 0x2F) || in(0x3A, 0x40) || in(0x5B, 0x60) || in(0x7B, 0x7E))
    return true;
  if (in(0xA1, 0xA9) || in(0xAB, 0xB1) || cp == 0xB4 || in(0xB6, 0xB8) ||
      cp == 0xBB || cp == 0xBF || cp == 0xD7 || cp == 0xF7)
    return true;
  if (in(0x2010, 0x2027) || in(0x2030, 0x205E)) return true;   // general punct
  if (in(0x20A0, 0x20CF)) return true;                         // currency
  if (in(0x2190, 0x2BFF)) return true;                         // arrows, math
  if (in(0x3001, 0x303F)) return true;                         // CJK punct
  if (in(0xFF01, 0xFF0F) || in(0xFF1A, 0xFF20) || in(0xFF3B, 0xFF40) ||
      in(0xFF5B, 0xFF65))
    return true;                                               // fullwidth
  if (in(0x1F300, 0x1FAFF)) return true;                       // emoji
  return false;
}

namespace {

// Decodes one UTF-8 codepoint; returns its byte length, 0 on invalid input.
std::size_t decode_utf8(std::string_view s, std::size_t i, char32_t& cp) {
  unsigned char b0 = static_cast<unsigned char>(s[i]);
  std::size_t len;
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    len = 2;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    len = 3;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    len = 4;
  } else {
    return 0;
  }
  if (i + len > s.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  return len;
}

}  // namespace

std::string strip_punctuation(std::string_view s) {
  std::string kept;
  kept.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    char32_t cp = 0;
    std::size_t len = decode_utf8(s, i, cp);
    if (len == 0) {
      kept.push_back(s[i]);
      ++i;
      continue;
    }
    if (!is_punct_or_symbol(cp)) kept.append(s.substr(i, len));
    i += len;
  }
  // Re-collapse whitespace.
  std::string out;
  out.reserve(kept.size());
  bool in_space = false;
  for (char c : kept) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      in_space = false;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<std::string> analyze(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      if (!is_stop_word(cur)) tokens.push_back(porter_stem(cur));
      cur.clear();
    }
  };
  for (char c : text) {
    unsigned char u = static_cast<unsigned char>(c);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || u >= 0x80) {
      cur.push_back(c);
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

}  // namespace qvar
