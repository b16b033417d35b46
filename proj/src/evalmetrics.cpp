#include "qvar/evalmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <unordered_set>

namespace qvar {

double precision_at_k(const RankedRun& run, const JudgmentSet& qrels,
                      std::size_t k) {
  if (k < 1) throw ValidationError("precision_at_k: k must be >= 1");
  std::size_t rel = 0;
  std::size_t depth = std::min(k, run.entries.size());
  for (std::size_t i = 0; i < depth; ++i)
    if (qrels.relevant(run.topic_id, run.entries[i].doc_id)) ++rel;
  return static_cast<double>(rel) / static_cast<double>(k);
}

double ndcg_at_k(const RankedRun& run, const JudgmentSet& qrels, std::size_t k,
                 bool exponential_gain) {
  if (k < 1) throw ValidationError("ndcg_at_k: k must be >= 1");
  auto gain = [exponential_gain](int grade) {
    return exponential_gain ? std::pow(2.0, grade) - 1.0
                            : static_cast<double>(grade);
  };

  double dcg = 0.0;
  std::size_t depth = std::min(k, run.entries.size());
  for (std::size_t i = 0; i < depth; ++i) {
    auto g = qrels.grade(run.topic_id, run.entries[i].doc_id);
    if (g && *g > 0)
      dcg += gain(*g) / std::log2(static_cast<double>(i) + 2.0);
  }

  // Ideal ranking over all judged docs for the topic, grades descending.
  std::vector<int> grades;
  for (const auto& [key, grade] : qrels.grades)
    if (key.first == run.topic_id && grade > 0) grades.push_back(grade);
  if (grades.empty()) {
    std::cerr << "warning: topic " << run.topic_id
              << " has no relevant judgments, ndcg=0\n";
    return 0.0;
  }
  std::sort(grades.rbegin(), grades.rend());
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(k, grades.size()); ++i)
    idcg += gain(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

RbpValue rbp(const RankedRun& run, const JudgmentSet& qrels, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("rbp: p must be in (0, 1)");
  RbpValue v;
  double weight = 1.0 - p;  // (1-p) * p^(i-1)
  for (const auto& e : run.entries) {
    auto g = qrels.grade(run.topic_id, e.doc_id);
    if (!g) {
      v.residual += weight;
    } else if (*g >= 1) {
      v.base += weight;
    }
    weight *= p;
  }
  // Tail beyond retrieved depth d: p^d.
  v.residual += std::pow(p, static_cast<double>(run.entries.size()));
  return v;
}

double rbo(const std::vector<std::string>& a, const std::vector<std::string>& b,
           double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("rbo: p must be in (0, 1)");
  {
    std::unordered_set<std::string> sa(a.begin(), a.end());
    std::unordered_set<std::string> sb(b.begin(), b.end());
    if (sa.size() != a.size() || sb.size() != b.size())
      throw ValidationError("rbo: duplicate ids within a list");
  }
  std::size_t d = std::min(a.size(), b.size());
  if (d == 0) return 0.0;

  // RBO_ext = (1-p)/p * sum_{k=1..d} A_k p^k + A_d p^d, with
  // A_k = |a[1..k] n b[1..k]| / k.
  std::unordered_set<std::string> seen_a, seen_b;
  std::size_t overlap = 0;
  double sum = 0.0;
  double pk = 1.0;  // p^k built incrementally
  double a_d = 0.0;
  for (std::size_t k = 1; k <= d; ++k) {
    const std::string& xa = a[k - 1];
    const std::string& xb = b[k - 1];
    if (xa == xb) {
      ++overlap;
    } else {
      if (seen_b.contains(xa)) ++overlap;
      if (seen_a.contains(xb)) ++overlap;
      seen_a.insert(xa);
      seen_b.insert(xb);
    }
    pk *= p;
    a_d = static_cast<double>(overlap) / static_cast<double>(k);
    sum += a_d * pk;
  }
  return (1.0 - p) / p * sum + a_d * pk;
}

RboScore topic_rbo(const std::vector<const RankedRun*>& runs, double p,
                   std::size_t depth) {
  if (runs.size() < 2)
    throw ValidationError("topic_rbo: need at least 2 variants");
  auto ids = [&](const RankedRun& run) {
    std::vector<std::string> out;
    std::size_t n = std::min(depth, run.entries.size());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(run.entries[i].doc_id);
    return out;
  };
  std::vector<std::vector<std::string>> lists;
  lists.reserve(runs.size());
  for (const auto* r : runs) lists.push_back(ids(*r));

  RboScore score;
  score.topic_id = runs.front()->topic_id;
  double sum = 0.0;
  for (std::size_t i = 0; i < lists.size(); ++i)
    for (std::size_t j = i + 1; j < lists.size(); ++j) {
      sum += rbo(lists[i], lists[j], p);
      ++score.num_pairs;
    }
  score.mean_rbo = sum / static_cast<double>(score.num_pairs);
  return score;
}

AggregateScores aggregate_scores(const std::vector<EffectivenessScore>& scores) {
  if (scores.empty())
    throw ValidationError("aggregate_scores: no scores");
  AggregateScores agg;
  agg.num_scores = scores.size();

  struct Sums {
    double p = 0, ndcg = 0, base = 0, resid = 0;
    std::size_t n = 0;
  };
  Sums micro;
  std::map<std::string, Sums> by_topic;
  for (const auto& s : scores) {
    micro.p += s.p_at_k;
    micro.ndcg += s.ndcg_at_k;
    micro.base += s.rbp_base;
    micro.resid += s.rbp_residual;
    ++micro.n;
    Sums& t = by_topic[s.topic_id];
    t.p += s.p_at_k;
    t.ndcg += s.ndcg_at_k;
    t.base += s.rbp_base;
    t.resid += s.rbp_residual;
    ++t.n;
  }
  auto dn = static_cast<double>(micro.n);
  agg.micro_p = micro.p / dn;
  agg.micro_ndcg = micro.ndcg / dn;
  agg.micro_rbp_base = micro.base / dn;
  agg.micro_rbp_residual = micro.resid / dn;

  agg.num_topics = by_topic.size();
  auto dt = static_cast<double>(by_topic.size());
  for (const auto& [topic, t] : by_topic) {
    auto tn = static_cast<double>(t.n);
    agg.macro_p += t.p / tn / dt;
    agg.macro_ndcg += t.ndcg / tn / dt;
    agg.macro_rbp_base += t.base / tn / dt;
    agg.macro_rbp_residual += t.resid / tn / dt;
  }
  return agg;
}

}  // namespace qvar
