#pragma once

#include <map>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"

namespace qvar {

struct EffectivenessScore {
  std::string topic_id;
  std::string set_label;
  int variant_index = 0;
  double p_at_k = 0.0;
  double ndcg_at_k = 0.0;
  double rbp_base = 0.0;
  double rbp_residual = 0.0;
};

struct RboScore {
  std::string topic_id;
  double mean_rbo = 0.0;
  std::size_t num_pairs = 0;
};

struct RbpValue {
  double base = 0.0;
  double residual = 0.0;
};

// Unjudged documents count as non-relevant; relevance is grade >= 1.
double precision_at_k(const RankedRun& run, const JudgmentSet& qrels,
                      std::size_t k);

// Linear gain (grade), discount 1/log2(i+1); ideal ranking from all judged
// docs of the topic. 0 when the topic has no relevant judgments (logged).
// Set exponential_gain for 2^grade - 1 gains.
double ndcg_at_k(const RankedRun& run, const JudgmentSet& qrels, std::size_t k,
                 bool exponential_gain = false);

// Binary-relevance RBP; residual covers unjudged retrieved ranks plus the
// unretrieved tail p^d.
RbpValue rbp(const RankedRun& run, const JudgmentSet& qrels, double p);

// Extrapolated RBO (Webber et al.), evaluated at d = min(|a|, |b|).
double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b,
           double p);

// Mean extrapolated RBO over all unordered pairs of a topic's runs,
// truncated to `depth`.
RboScore topic_rbo(const std::vector<const RankedRun*>& runs, double p,
                   std::size_t depth);

struct AggregateScores {
  // micro: mean over all (topic, variant) scores; macro: mean of per-topic means
  double micro_p = 0.0, micro_ndcg = 0.0, micro_rbp_base = 0.0,
         micro_rbp_residual = 0.0;
  double macro_p = 0.0, macro_ndcg = 0.0, macro_rbp_base = 0.0,
         macro_rbp_residual = 0.0;
  std::size_t num_scores = 0;
  std::size_t num_topics = 0;
};

AggregateScores aggregate_scores(const std::vector<EffectivenessScore>& scores);

}  // namespace qvar
