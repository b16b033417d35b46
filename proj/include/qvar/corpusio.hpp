#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qvar/util.hpp"

namespace qvar {

struct TopicBackstory {
  std::string topic_id;
  std::string text;
  bool operator==(const TopicBackstory&) const = default;
};

// Per-topic query variant lists with a provenance label ("human", "gpt-t0.5").
// Duplicate query strings within a topic are kept; dedup happens downstream.
struct VariantSet {
  std::string label;
  std::map<std::string, std::vector<std::string>> entries;
  bool operator==(const VariantSet&) const = default;
};

// Graded judgments. Absent keys mean "unjudged", which is distinct from
// grade 0 (judged non-relevant).
struct JudgmentSet {
  int g_max = 4;
  std::map<std::pair<std::string, std::string>, int> grades;

  std::optional<int> grade(const std::string& topic_id,
                           const std::string& doc_id) const {
    auto it = grades.find({topic_id, doc_id});
    if (it == grades.end()) return std::nullopt;
    return it->second;
  }
  bool relevant(const std::string& topic_id, const std::string& doc_id) const {
    auto g = grade(topic_id, doc_id);
    return g.has_value() && *g >= 1;
  }
  bool operator==(const JudgmentSet&) const = default;
};

struct RunEntry {
  std::string doc_id;
  double score = 0.0;
  bool operator==(const RunEntry&) const = default;
};

struct RankedRun {
  std::string topic_id;
  std::string set_label;
  int variant_index = 0;
  std::vector<RunEntry> entries;
  bool operator==(const RankedRun&) const = default;
};

struct VariantSetStats {
  std::size_t total = 0;
  std::size_t unique = 0;
  std::size_t min_per_topic = 0;
  std::size_t max_per_topic = 0;
  double avg_per_topic = 0.0;
  double avg_words_per_query = 0.0;
};

std::vector<TopicBackstory> parse_backstories(const std::filesystem::path& path);
std::string write_backstories(const std::vector<TopicBackstory>& backstories);

VariantSet parse_variants(const std::filesystem::path& path,
                          const std::string& label);
std::string write_variants(const VariantSet& set);

// TREC qrels: `topic 0 docid grade`. Duplicate (topic, doc) lines overwrite
// with a warning unless strict_duplicates is set.
JudgmentSet parse_qrels(const std::filesystem::path& path, int g_max = 4,
                        bool strict_duplicates = false);
std::string write_qrels(const JudgmentSet& qrels);

// TREC run format: `topic Q0 docid rank score tag`, score with 6 decimals.
// The tag encodes "<set_label>#<variant_index>"; foreign tags without '#'
// parse with variant_index 0.
std::string write_runs(const std::vector<RankedRun>& runs);
std::vector<RankedRun> parse_runs(const std::filesystem::path& path);

VariantSetStats variant_stats(const VariantSet& set);

// Minimal CSV assembly; fields with commas, quotes or newlines get quoted.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header) { row(header); }
  void row(const std::vector<std::string>& fields);
  const std::string& str() const { return out_; }

 private:
  std::string out_;
};

std::string format_real(double v);  // fixed notation, 6 decimals

}  // namespace qvar
