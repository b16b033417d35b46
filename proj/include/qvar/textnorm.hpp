#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"

namespace qvar {

// Cumulative relaxation levels: raw (T0), punctuation-insensitive (T1),
// word-form-insensitive (T2), stop-word-insensitive (T3),
// order-insensitive (T4).
enum class NormLevel { T0 = 0, T1, T2, T3, T4 };

const char* to_string(NormLevel level);
std::vector<NormLevel> all_norm_levels();

struct NormOptions {
  // T0 lowercases by default; keyword retrieval is case-insensitive and the
  // choice is switchable for case-sensitive raw matching.
  bool t0_case_sensitive = false;
};

struct CanonicalQuery {
  std::string canonical;
  NormLevel level;
  std::string source;
};

struct TopicSimilarity {
  double jaccard = 0.0;
  double coverage = 0.0;
};

struct SetSimilarity {
  NormLevel level;
  double jaccard = 0.0;   // unweighted mean over topics
  double coverage = 0.0;  // unweighted mean over topics
  std::map<std::string, TopicSimilarity> per_topic;
};

CanonicalQuery normalize(const std::string& query, NormLevel level,
                         const NormOptions& opts = {});

std::set<std::string> unique_canonical(const VariantSet& set,
                                       const std::string& topic_id,
                                       NormLevel level,
                                       const NormOptions& opts = {});

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Asymmetric: fraction of `reference` reproduced by `candidate`.
double coverage_ratio(const std::set<std::string>& reference,
                      const std::set<std::string>& candidate);

// Per-topic similarity at each level, plus unweighted topic means. A query
// counts as matched when its canonical form at the level occurs on the other
// side; jaccard is the matched fraction of the combined unique queries and
// coverage the matched fraction of the human ones, so both are non-decreasing
// from T0 through T4. Both sets must cover exactly the same topics.
std::vector<SetSimilarity> cascade_compare(const VariantSet& human,
                                           const VariantSet& other,
                                           const std::vector<NormLevel>& levels,
                                           const NormOptions& opts = {});

}  // namespace qvar
