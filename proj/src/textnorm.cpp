#include "qvar/textnorm.hpp"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "qvar/analysis.hpp"

namespace qvar {

const char* to_string(NormLevel level) {
  switch (level) {
    case NormLevel::T0: return "T0";
    case NormLevel::T1: return "T1";
    case NormLevel::T2: return "T2";
    case NormLevel::T3: return "T3";
    case NormLevel::T4: return "T4";
  }
  return "?";
}

std::vector<NormLevel> all_norm_levels() {
  return {NormLevel::T0, NormLevel::T1, NormLevel::T2, NormLevel::T3,
          NormLevel::T4};
}

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string collapse_ws(std::string_view s) {
  return join(split_ws(s));
}

// Porter is not idempotent in rare cases ("agree" -> "agre" -> "agr");
// canonical forms must be, so stem until stable.
std::string stem_fixpoint(std::string token) {
  for (int i = 0; i < 8; ++i) {
    std::string next = porter_stem(token);
    if (next == token) break;
    token = std::move(next);
  }
  return token;
}

const std::set<std::string>& fixpoint_stop_stems() {
  static const std::set<std::string> stems = [] {
    std::set<std::string> s;
    for (const auto& w : stop_words()) s.insert(stem_fixpoint(w));
    return s;
  }();
  return stems;
}

// Each level is a string-to-string step applied on top of the previous
// level's canonical form, so coarser levels can only merge classes.
std::string apply_level(const std::string& prev, NormLevel level,
                        const NormOptions& opts) {
  switch (level) {
    case NormLevel::T0: {
      std::string s = collapse_ws(prev);
      if (!opts.t0_case_sensitive) s = to_lower_ascii(s);
      return s;
    }
    case NormLevel::T1:
      return collapse_ws(strip_punctuation(to_lower_ascii(prev)));
    case NormLevel::T2: {
      auto tokens = split_ws(prev);
      for (auto& t : tokens) t = stem_fixpoint(t);
      return join(tokens);
    }
    case NormLevel::T3: {
      auto tokens = split_ws(prev);
      std::vector<std::string> kept;
      for (auto& t : tokens)
        if (!fixpoint_stop_stems().contains(t)) kept.push_back(t);
      // Stop-word-only queries keep their T2 form rather than collapsing to
      // a shared empty canonical.
      if (kept.empty()) return prev;
      return join(kept);
    }
    case NormLevel::T4: {
      auto tokens = split_ws(prev);
      std::sort(tokens.begin(), tokens.end());
      return join(tokens);
    }
  }
  return prev;
}

}  // namespace

CanonicalQuery normalize(const std::string& query, NormLevel level,
                         const NormOptions& opts) {
  if (trim(query).empty())
    throw ValidationError("normalize: empty query");
  std::string s = query;
  for (int l = 0; l <= static_cast<int>(level); ++l)
    s = apply_level(s, static_cast<NormLevel>(l), opts);
  return {std::move(s), level, query};
}

std::set<std::string> unique_canonical(const VariantSet& set,
                                       const std::string& topic_id,
                                       NormLevel level,
                                       const NormOptions& opts) {
  auto it = set.entries.find(topic_id);
  if (it == set.entries.end())
    throw ValidationError("unique_canonical: topic '" + topic_id +
                          "' not present in set '" + set.label + "'");
  std::set<std::string> out;
  for (const auto& q : it->second)
    out.insert(normalize(q, level, opts).canonical);
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) {
    std::cerr << "warning: jaccard of two empty sets, returning 1.0 by convention\n";
    return 1.0;
  }
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double coverage_ratio(const std::set<std::string>& reference,
                      const std::set<std::string>& candidate) {
  if (reference.empty())
    throw ValidationError("coverage_ratio: empty reference set");
  std::size_t inter = 0;
  for (const auto& x : reference) inter += candidate.count(x);
  return static_cast<double>(inter) / static_cast<double>(reference.size());
}

std::vector<SetSimilarity> cascade_compare(const VariantSet& human,
                                           const VariantSet& other,
                                           const std::vector<NormLevel>& levels,
                                           const NormOptions& opts) {
  std::string missing;
  for (const auto& [topic, _] : human.entries)
    if (!other.entries.contains(topic)) missing += " " + topic;
  for (const auto& [topic, _] : other.entries)
    if (!human.entries.contains(topic)) missing += " " + topic;
  if (!missing.empty())
    throw ValidationError("cascade_compare: topic mismatch, missing:" + missing);
  if (human.entries.empty())
    throw ValidationError("cascade_compare: no topics");

  // Similarity is measured over the T0-unique queries of each side: a query
  // matches at level L when its level-L canonical form also occurs on the
  // other side. Relaxation can only create matches, so jaccard and coverage
  // are non-decreasing from T0 through T4 — unlike a plain Jaccard of the
  // canonical sets, which can dip when two already-matched queries merge.
  std::vector<SetSimilarity> out;
  for (NormLevel level : levels) {
    SetSimilarity sim;
    sim.level = level;
    double jsum = 0.0, csum = 0.0;
    for (const auto& [topic, _] : human.entries) {
      auto h0 = unique_canonical(human, topic, NormLevel::T0, opts);
      auto o0 = unique_canonical(other, topic, NormLevel::T0, opts);
      auto hl = unique_canonical(human, topic, level, opts);
      auto ol = unique_canonical(other, topic, level, opts);

      std::set<std::string> universe = h0;
      universe.insert(o0.begin(), o0.end());
      std::size_t matched_union = 0;
      for (const auto& q : universe) {
        const std::string& c = normalize(q, level, opts).canonical;
        if (hl.contains(c) && ol.contains(c)) ++matched_union;
      }
      std::size_t matched_human = 0;
      for (const auto& q : h0)
        if (ol.contains(normalize(q, level, opts).canonical)) ++matched_human;

      TopicSimilarity ts;
      ts.jaccard = static_cast<double>(matched_union) /
                   static_cast<double>(universe.size());
      ts.coverage =
          static_cast<double>(matched_human) / static_cast<double>(h0.size());
      jsum += ts.jaccard;
      csum += ts.coverage;
      sim.per_topic.emplace(topic, ts);
    }
    auto n = static_cast<double>(human.entries.size());
    sim.jaccard = jsum / n;
    sim.coverage = csum / n;
    out.push_back(std::move(sim));
  }
  return out;
}

}  // namespace qvar
