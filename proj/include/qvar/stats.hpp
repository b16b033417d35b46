#pragma once

#include <map>
#include <string>
#include <vector>

namespace qvar {

enum class Significance { none, p05, p01 };
const char* to_string(Significance s);

struct TestResult {
  std::string metric;
  std::string baseline;
  std::string comparison;
  double t_statistic = 0.0;
  double p_value_raw = 1.0;
  double p_value_adjusted = 1.0;
  std::size_t n = 0;
  Significance significance = Significance::none;
};

struct TTest {
  double t = 0.0;
  double p = 1.0;
};

// Two-sided paired t-test. All-zero differences give t=0, p=1; zero variance
// with nonzero mean gives t=+/-inf, p=0 (both logged).
TTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

// Regularized incomplete beta I_x(a, b) via the standard continued fraction.
double incomplete_beta(double a, double b, double x);

// Two-sided p for Student's t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

std::vector<double> bonferroni_adjust(const std::vector<double>& p_values,
                                      std::size_t m);

// One test per non-baseline set against the baseline, Bonferroni-adjusted
// with m = number of non-baseline sets. Scores are per-topic values aligned
// by topic id.
std::vector<TestResult> compare_to_baseline(
    const std::map<std::string, std::map<std::string, double>>& per_topic_scores,
    const std::string& baseline_label, const std::string& metric_name);

}  // namespace qvar
