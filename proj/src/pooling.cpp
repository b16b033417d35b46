#include "qvar/pooling.hpp"

#include <algorithm>
#include <iostream>

#include "qvar/textnorm.hpp"
#include "qvar/util.hpp"

namespace qvar {

namespace {

std::map<std::string, std::vector<const RankedRun*>> group_by_topic(
    const std::vector<RankedRun>& runs) {
  std::map<std::string, std::vector<const RankedRun*>> out;
  for (const auto& r : runs) out[r.topic_id].push_back(&r);
  return out;
}

std::set<std::string> filter_relevant(const std::set<std::string>& docs,
                                      const std::string& topic,
                                      const JudgmentSet& qrels) {
  std::set<std::string> out;
  for (const auto& d : docs)
    if (qrels.relevant(topic, d)) out.insert(d);
  return out;
}

}  // namespace

Pool build_pool(const std::vector<const RankedRun*>& runs, std::size_t depth) {
  if (runs.empty()) throw ValidationError("build_pool: no runs for topic");
  if (depth < 1) throw ValidationError("build_pool: depth must be >= 1");
  Pool pool;
  pool.topic_id = runs.front()->topic_id;
  pool.depth = depth;
  pool.contributing_variants = runs.size();
  for (const auto* run : runs) {
    std::size_t n = std::min(depth, run->entries.size());
    for (std::size_t i = 0; i < n; ++i) pool.doc_ids.insert(run->entries[i].doc_id);
  }
  return pool;
}

std::map<std::string, Pool> build_pools(const std::vector<RankedRun>& runs,
                                        std::size_t depth) {
  std::map<std::string, Pool> out;
  for (auto& [topic, topic_runs] : group_by_topic(runs))
    out.emplace(topic, build_pool(topic_runs, depth));
  return out;
}

std::vector<OverlapPoint> pool_overlap(
    const std::vector<RankedRun>& runs_a, const std::vector<RankedRun>& runs_b,
    const std::vector<std::size_t>& depths,
    const JudgmentSet* relevance_filter) {
  auto by_topic_a = group_by_topic(runs_a);
  auto by_topic_b = group_by_topic(runs_b);
  std::string missing;
  for (const auto& [t, _] : by_topic_a)
    if (!by_topic_b.contains(t)) missing += " " + t;
  for (const auto& [t, _] : by_topic_b)
    if (!by_topic_a.contains(t)) missing += " " + t;
  if (!missing.empty())
    throw ValidationError("pool_overlap: topic mismatch, missing:" + missing);

  std::vector<OverlapPoint> out;
  for (std::size_t depth : depths) {
    OverlapPoint point;
    point.depth = depth;
    double sum = 0.0;
    std::size_t counted = 0;
    for (const auto& [topic, ra] : by_topic_a) {
      auto pa = build_pool(ra, depth).doc_ids;
      auto pb = build_pool(by_topic_b.at(topic), depth).doc_ids;
      if (relevance_filter) {
        pa = filter_relevant(pa, topic, *relevance_filter);
        pb = filter_relevant(pb, topic, *relevance_filter);
        if (pa.empty() && pb.empty()) {
          std::cerr << "warning: topic " << topic
                    << " has empty relevance-filtered pools at depth " << depth
                    << ", skipped\n";
          ++point.skipped_topics;
          continue;
        }
      }
      double j = jaccard(pa, pb);
      point.per_topic.emplace(topic, j);
      sum += j;
      ++counted;
    }
    point.mean_jaccard = counted ? sum / static_cast<double>(counted) : 0.0;
    out.push_back(std::move(point));
  }
  return out;
}

PoolProperties pool_properties(const std::map<std::string, Pool>& pools,
                               const JudgmentSet& qrels) {
  if (pools.empty()) throw ValidationError("pool_properties: no pools");
  PoolProperties props;
  std::size_t counted = 0;
  for (const auto& [topic, pool] : pools) {
    props.size += static_cast<double>(pool.doc_ids.size());
    if (pool.doc_ids.empty()) continue;
    std::size_t rel = 0, unjudged = 0;
    for (const auto& d : pool.doc_ids) {
      auto g = qrels.grade(topic, d);
      if (!g)
        ++unjudged;
      else if (*g >= 1)
        ++rel;
    }
    auto n = static_cast<double>(pool.doc_ids.size());
    props.frac_relevant += static_cast<double>(rel) / n;
    props.frac_unjudged += static_cast<double>(unjudged) / n;
    ++counted;
  }
  props.size /= static_cast<double>(pools.size());
  if (counted) {
    props.frac_relevant /= static_cast<double>(counted);
    props.frac_unjudged /= static_cast<double>(counted);
  }
  return props;
}

GrowthCurve growth_curve(const std::vector<RankedRun>& runs, std::size_t depth,
                         std::size_t num_orderings, std::uint64_t seed,
                         std::size_t cutoff) {
  if (num_orderings < 1)
    throw ValidationError("growth_curve: num_orderings must be >= 1");
  auto by_topic = group_by_topic(runs);
  if (by_topic.empty()) throw ValidationError("growth_curve: no runs");

  std::size_t max_variants = 0;
  for (const auto& [_, rs] : by_topic)
    max_variants = std::max(max_variants, rs.size());
  max_variants = std::min(max_variants, cutoff);

  GrowthCurve curve;
  curve.depth = depth;
  curve.orderings = num_orderings;
  curve.seed = seed;
  std::vector<double> sums(max_variants, 0.0);

  for (const auto& [topic, topic_runs] : by_topic) {
    std::uint64_t topic_salt = fnv1a(topic, seed);
    for (std::size_t o = 0; o < num_orderings; ++o) {
      Rng rng(topic_salt + o);
      std::vector<const RankedRun*> order = topic_runs;
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng.below(i)]);

      std::set<std::string> pool;
      for (std::size_t m = 0; m < max_variants; ++m) {
        if (m < order.size()) {
          const auto& entries = order[m]->entries;
          std::size_t n = std::min(depth, entries.size());
          for (std::size_t i = 0; i < n; ++i) pool.insert(entries[i].doc_id);
        }
        // Topics with fewer than m variants keep contributing their full pool.
        sums[m] += static_cast<double>(pool.size());
      }
    }
  }

  auto denom = static_cast<double>(by_topic.size() * num_orderings);
  for (std::size_t m = 0; m < max_variants; ++m)
    curve.points.push_back({m + 1, sums[m] / denom});
  return curve;
}

}  // namespace qvar
