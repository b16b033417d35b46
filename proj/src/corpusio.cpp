#include "qvar/corpusio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace qvar {

namespace {

// Iterates non-blank lines, tracking 1-based line numbers.
template <typename Fn>
void for_lines(const std::filesystem::path& path, Fn&& fn) {
  std::string data = read_file(path);
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= data.size()) {
    std::size_t end = data.find('\n', start);
    if (end == std::string::npos) end = data.size();
    ++lineno;
    std::string_view line(data.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) fn(lineno, line);
    start = end + 1;
    if (end == data.size()) break;
  }
}

}  // namespace

std::vector<TopicBackstory> parse_backstories(const std::filesystem::path& path) {
  std::vector<TopicBackstory> out;
  std::unordered_set<std::string> seen;
  for_lines(path, [&](std::size_t lineno, std::string_view line) {
    auto cols = split_char(line, '\t');
    if (cols.size() != 2)
      throw ParseError(path.string(), lineno,
                       "expected 2 tab-separated columns, got " +
                           std::to_string(cols.size()));
    std::string id(trim(cols[0]));
    std::string text(trim(cols[1]));
    if (id.empty() || text.empty())
      throw ParseError(path.string(), lineno, "empty topic id or text");
    if (!seen.insert(id).second)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": duplicate topic id '" + id + "'");
    out.push_back({std::move(id), std::move(text)});
  });
  return out;
}

std::string write_backstories(const std::vector<TopicBackstory>& backstories) {
  std::string out;
  for (const auto& b : backstories) {
    out += b.topic_id;
    out += '\t';
    out += b.text;
    out += '\n';
  }
  return out;
}

VariantSet parse_variants(const std::filesystem::path& path,
                          const std::string& label) {
  VariantSet set;
  set.label = label;
  for_lines(path, [&](std::size_t lineno, std::string_view line) {
    auto cols = split_char(line, '\t');
    if (cols.size() != 2)
      throw ParseError(path.string(), lineno,
                       "expected 2 tab-separated columns, got " +
                           std::to_string(cols.size()));
    std::string id(trim(cols[0]));
    std::string query(trim(cols[1]));
    if (id.empty())
      throw ParseError(path.string(), lineno, "empty topic id");
    if (query.empty())
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": empty query after trimming");
    set.entries[id].push_back(std::move(query));
  });
  return set;
}

std::string write_variants(const VariantSet& set) {
  std::string out;
  for (const auto& [topic, queries] : set.entries)
    for (const auto& q : queries) {
      out += topic;
      out += '\t';
      out += q;
      out += '\n';
    }
  return out;
}

JudgmentSet parse_qrels(const std::filesystem::path& path, int g_max,
                        bool strict_duplicates) {
  JudgmentSet qrels;
  qrels.g_max = g_max;
  for_lines(path, [&](std::size_t lineno, std::string_view line) {
    auto fields = split_ws(line);
    if (fields.size() != 4)
      throw ParseError(path.string(), lineno,
                       "expected 4 whitespace-separated fields, got " +
                           std::to_string(fields.size()));
    int grade = 0;
    try {
      std::size_t pos = 0;
      grade = std::stoi(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ParseError(path.string(), lineno,
                       "non-integer grade '" + fields[3] + "'");
    }
    if (grade < 0 || grade > g_max)
      throw ParseError(path.string(), lineno,
                       "grade " + std::to_string(grade) + " outside [0, " +
                           std::to_string(g_max) + "]");
    auto key = std::make_pair(fields[0], fields[2]);
    auto [it, inserted] = qrels.grades.emplace(key, grade);
    if (!inserted) {
      if (strict_duplicates)
        throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                              ": duplicate judgment for (" + fields[0] + ", " +
                              fields[2] + ")");
      std::cerr << "warning: " << path.string() << ":" << lineno
                << ": duplicate judgment for (" << fields[0] << ", "
                << fields[2] << "), keeping later grade\n";
      it->second = grade;
    }
  });
  return qrels;
}

std::string write_qrels(const JudgmentSet& qrels) {
  std::string out;
  for (const auto& [key, grade] : qrels.grades) {
    out += key.first;
    out += " 0 ";
    out += key.second;
    out += ' ';
    out += std::to_string(grade);
    out += '\n';
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string write_runs(const std::vector<RankedRun>& runs) {
  std::string out;
  for (const auto& run : runs) {
    int rank = 1;
    for (const auto& e : run.entries) {
      out += run.topic_id;
      out += " Q0 ";
      out += e.doc_id;
      out += ' ';
      out += std::to_string(rank++);
      out += ' ';
      out += format_real(e.score);
      out += ' ';
      out += run.set_label;
      out += '#';
      out += std::to_string(run.variant_index);
      out += '\n';
    }
  }
  return out;
}

std::vector<RankedRun> parse_runs(const std::filesystem::path& path) {
  std::vector<RankedRun> runs;
  // (topic, raw tag) -> index into runs; groups appear in first-seen order.
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  std::map<std::size_t, int> last_rank;
  for_lines(path, [&](std::size_t lineno, std::string_view line) {
    auto fields = split_ws(line);
    if (fields.size() != 6)
      throw ParseError(path.string(), lineno,
                       "expected 6 whitespace-separated fields, got " +
                           std::to_string(fields.size()));
    const std::string& topic = fields[0];
    const std::string& doc = fields[2];
    const std::string& tag = fields[5];
    int rank = 0;
    double score = 0.0;
    try {
      rank = std::stoi(fields[3]);
      score = std::stod(fields[4]);
    } catch (const std::exception&) {
      throw ParseError(path.string(), lineno, "malformed rank or score");
    }
    if (!std::isfinite(score))
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": non-finite score");
    auto key = std::make_pair(topic, tag);
    auto it = index.find(key);
    if (it == index.end()) {
      RankedRun run;
      run.topic_id = topic;
      auto hash = tag.rfind('#');
      if (hash != std::string::npos) {
        run.set_label = tag.substr(0, hash);
        try {
          run.variant_index = std::stoi(tag.substr(hash + 1));
        } catch (const std::exception&) {
          run.set_label = tag;
          run.variant_index = 0;
        }
      } else {
        run.set_label = tag;
        run.variant_index = 0;
      }
      runs.push_back(std::move(run));
      it = index.emplace(key, runs.size() - 1).first;
      last_rank[it->second] = 0;
    }
    RankedRun& run = runs[it->second];
    int& prev = last_rank[it->second];
    if (rank != prev + 1)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": rank " + std::to_string(rank) +
                            " not contiguous (expected " +
                            std::to_string(prev + 1) + ")");
    if (!run.entries.empty() && score > run.entries.back().score)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) +
                            ": score increases with rank");
    prev = rank;
    run.entries.push_back({doc, score});
  });
  return runs;
}

VariantSetStats variant_stats(const VariantSet& set) {
  if (set.entries.empty())
    throw ValidationError("variant_stats: empty variant set");
  VariantSetStats s;
  std::set<std::string> distinct;
  std::size_t words = 0;
  s.min_per_topic = SIZE_MAX;
  for (const auto& [topic, queries] : set.entries) {
    s.total += queries.size();
    s.min_per_topic = std::min(s.min_per_topic, queries.size());
    s.max_per_topic = std::max(s.max_per_topic, queries.size());
    for (const auto& q : queries) {
      distinct.insert(q);
      words += split_ws(q).size();
    }
  }
  s.unique = distinct.size();
  s.avg_per_topic = static_cast<double>(s.total) /
                    static_cast<double>(set.entries.size());
  s.avg_words_per_query =
      static_cast<double>(words) / static_cast<double>(s.total);
  return s;
}

void CsvBuilder::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      out_ += '"';
      for (char c : f) {
        if (c == '"') out_ += '"';
        out_ += c;
      }
      out_ += '"';
    } else {
      out_ += f;
    }
  }
  out_ += '\n';
}

}  // namespace qvar
