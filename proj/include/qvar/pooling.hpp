#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"

namespace qvar {

struct Pool {
  std::string topic_id;
  std::size_t depth = 0;
  std::set<std::string> doc_ids;
  std::size_t contributing_variants = 0;
};

struct PoolProperties {
  double size = 0.0;           // mean pool size over topics
  double frac_relevant = 0.0;  // mean fraction with grade >= 1
  double frac_unjudged = 0.0;  // mean fraction absent from qrels
};

struct GrowthPoint {
  std::size_t num_variants = 0;
  double mean_pool_size = 0.0;
};

struct GrowthCurve {
  std::size_t depth = 0;
  std::vector<GrowthPoint> points;
  std::size_t orderings = 0;
  std::uint64_t seed = 0;
};

struct OverlapPoint {
  std::size_t depth = 0;
  double mean_jaccard = 0.0;
  std::map<std::string, double> per_topic;
  std::size_t skipped_topics = 0;  // both filtered pools empty
};

// Union of top-`depth` doc ids across one topic's runs (runs from duplicate
// raw variants should already be deduplicated by the caller).
Pool build_pool(const std::vector<const RankedRun*>& runs, std::size_t depth);

// Per-topic pools for every topic of a run collection, keyed by topic.
std::map<std::string, Pool> build_pools(const std::vector<RankedRun>& runs,
                                        std::size_t depth);

// Mean per-topic Jaccard between two pool collections at each depth.
// With a relevance filter, only docs with grade >= 1 are kept; topics where
// both filtered pools are empty are excluded from the mean (counted).
std::vector<OverlapPoint> pool_overlap(
    const std::vector<RankedRun>& runs_a, const std::vector<RankedRun>& runs_b,
    const std::vector<std::size_t>& depths,
    const JudgmentSet* relevance_filter = nullptr);

PoolProperties pool_properties(const std::map<std::string, Pool>& pools,
                               const JudgmentSet& qrels);

// Mean pool size as variants are added one at a time, averaged over topics
// and over `num_orderings` seeded random variant orderings; the curve is cut
// at `cutoff` variants.
GrowthCurve growth_curve(const std::vector<RankedRun>& runs, std::size_t depth,
                         std::size_t num_orderings, std::uint64_t seed,
                         std::size_t cutoff = 48);

}  // namespace qvar
