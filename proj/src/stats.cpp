#include "qvar/stats.hpp"

#include <cmath>
#include <iostream>
#include <limits>

#include "qvar/util.hpp"

namespace qvar {

const char* to_string(Significance s) {
  switch (s) {
    case Significance::none: return "none";
    case Significance::p05: return "p<0.05";
    case Significance::p01: return "p<0.01";
  }
  return "?";
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                    a * std::log(x) + b * std::log(1.0 - x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  double x = df / (df + t * t);
  return incomplete_beta(df / 2.0, 0.5, x);
}

TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw ValidationError("paired_t_test: sample size mismatch");
  if (a.size() < 2)
    throw ValidationError("paired_t_test: need at least 2 pairs");
  std::size_t n = a.size();
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (a[i] - b[i]) - mean;
    ss += d * d;
  }
  double var = ss / static_cast<double>(n - 1);

  TTest r;
  if (var == 0.0) {
    if (mean == 0.0) {
      std::cerr << "note: paired_t_test on identical samples (t=0, p=1)\n";
      r.t = 0.0;
      r.p = 1.0;
    } else {
      std::cerr << "note: paired_t_test with zero-variance nonzero-mean "
                   "differences (t=inf, p=0)\n";
      r.t = mean > 0 ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity();
      r.p = 0.0;
    }
    return r;
  }
  double se = std::sqrt(var / static_cast<double>(n));
  r.t = mean / se;
  r.p = student_t_two_sided_p(r.t, static_cast<double>(n - 1));
  return r;
}

std::vector<double> bonferroni_adjust(const std::vector<double>& p_values,
                                      std::size_t m) {
  if (m < p_values.size())
    throw ValidationError("bonferroni_adjust: m smaller than number of tests");
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) {
    if (p < 0.0 || p > 1.0)
      throw ValidationError("bonferroni_adjust: p outside [0, 1]");
    out.push_back(std::min(1.0, p * static_cast<double>(m)));
  }
  return out;
}

std::vector<TestResult> compare_to_baseline(
    const std::map<std::string, std::map<std::string, double>>& per_topic_scores,
    const std::string& baseline_label, const std::string& metric_name) {
  auto base_it = per_topic_scores.find(baseline_label);
  if (base_it == per_topic_scores.end())
    throw ValidationError("compare_to_baseline: baseline set '" +
                          baseline_label + "' not found");
  const auto& baseline = base_it->second;
  for (const auto& [label, scores] : per_topic_scores) {
    if (scores.size() != baseline.size())
      throw ValidationError("compare_to_baseline: topic coverage mismatch for '" +
                            label + "'");
    for (const auto& [topic, _] : scores)
      if (!baseline.contains(topic))
        throw ValidationError(
            "compare_to_baseline: topic coverage mismatch for '" + label +
            "' (topic " + topic + ")");
  }

  std::size_t m = per_topic_scores.size() - 1;
  std::vector<TestResult> results;
  for (const auto& [label, scores] : per_topic_scores) {
    if (label == baseline_label) continue;
    std::vector<double> a, b;
    for (const auto& [topic, v] : scores) {
      a.push_back(v);
      b.push_back(baseline.at(topic));
    }
    TTest tt = paired_t_test(a, b);
    TestResult res;
    res.metric = metric_name;
    res.baseline = baseline_label;
    res.comparison = label;
    res.t_statistic = tt.t;
    res.p_value_raw = tt.p;
    res.p_value_adjusted = bonferroni_adjust({tt.p}, m > 0 ? m : 1).front();
    res.n = a.size();
    if (res.p_value_adjusted < 0.01)
      res.significance = Significance::p01;
    else if (res.p_value_adjusted < 0.05)
      res.significance = Significance::p05;
    results.push_back(std::move(res));
  }
  return results;
}

}  // namespace qvar
