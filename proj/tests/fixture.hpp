// Deterministic synthetic experiment data used across the test binaries:
// a ~1000-doc corpus, 10 topics (including "275"), human variants and qrels.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"
#include "qvar/util.hpp"

namespace fixture {

inline const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> v = {
      "windsor",  "knot",     "hiking",  "trail",    "garden",   "tomato",
      "volcano",  "eruption", "piano",   "chord",    "telescope","nebula",
      "sourdough","starter",  "marathon","training", "beekeeping","hive",
      "kayak",    "rapids",   "chess",   "opening",  "fossil",   "amber",
      "glacier",  "moraine",  "orchid",  "pollination","cipher", "decryption",
      "bridge",   "suspension","comet",  "orbit",    "violin",   "rosin",
      "pottery",  "glaze",    "falcon",  "migration","tide",     "estuary",
      "circuit",  "resistor", "yeast",   "ferment",  "saddle",   "stirrup",
      "lantern",  "festival", "quarry",  "granite",  "compass",  "bearing",
      "harvest",  "silo",     "meadow",  "clover",   "anchor",   "mooring",
      "turbine",  "blade",    "canyon",  "rim",      "ledger",   "audit",
      "mosaic",   "tessera",  "drought", "aquifer",  "summit",   "ridge",
      "harbor",   "dredge",   "copper",  "smelting", "willow",   "bark",
      "sonar",    "echo"};
  return v;
}

inline const std::vector<std::string>& topic_ids() {
  static const std::vector<std::string> t = {"301", "302", "303", "275",
                                             "304", "305", "306", "307",
                                             "308", "309"};
  return t;
}

// Four characteristic vocabulary words per topic, disjoint across topics.
inline std::vector<std::string> topic_words(std::size_t topic_index) {
  const auto& v = vocabulary();
  std::vector<std::string> w;
  for (std::size_t i = 0; i < 4; ++i)
    w.push_back(v[(topic_index * 4 + i) % v.size()]);
  return w;
}

inline std::string doc_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "d%04zu", i);
  return buf;
}

inline std::string corpus_jsonl(std::size_t num_docs = 1000,
                                std::uint64_t seed = 7) {
  const auto& vocab = vocabulary();
  qvar::Rng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < num_docs; ++i) {
    std::size_t len = 8 + rng.below(18);
    std::string text;
    // Bias a third of the tokens toward the owning topic's words so every
    // topic has plenty of on-topic documents.
    std::size_t topic_index = i % topic_ids().size();
    auto tw = topic_words(topic_index);
    for (std::size_t w = 0; w < len; ++w) {
      if (w) text += ' ';
      if (rng.below(3) == 0)
        text += tw[rng.below(tw.size())];
      else
        text += vocab[rng.below(vocab.size())];
    }
    out += "{\"id\": \"" + doc_name(i) + "\", \"contents\": \"" + text + "\"}\n";
  }
  return out;
}

inline std::string backstories_tsv() {
  std::string out;
  for (std::size_t i = 0; i < topic_ids().size(); ++i) {
    auto tw = topic_words(i);
    out += topic_ids()[i] + "\tYou recently became curious about " + tw[0] +
           " " + tw[1] + " and want to understand how " + tw[2] +
           " relates to " + tw[3] + " in practice.\n";
  }
  return out;
}

inline std::string human_variants_tsv(std::uint64_t seed = 11) {
  const auto& vocab = vocabulary();
  qvar::Rng rng(seed);
  std::string out;
  // Parse the backstories so some variants can quote them, the way people
  // lift phrases from the statement of the information need.
  for (std::size_t i = 0; i < topic_ids().size(); ++i) {
    auto tw = topic_words(i);
    std::string backstory = "you recently became curious about " + tw[0] +
                            " " + tw[1] + " and want to understand how " +
                            tw[2] + " relates to " + tw[3] + " in practice";
    auto words = qvar::split_ws(backstory);
    std::size_t n = 5 + rng.below(4);
    for (std::size_t q = 0; q < n; ++q) {
      std::string query;
      if (rng.below(3) == 0) {
        // contiguous fragment of the backstory
        std::size_t len = 2 + rng.below(4);
        std::size_t start = rng.below(words.size() - len + 1);
        for (std::size_t w = 0; w < len; ++w) {
          if (w) query += ' ';
          query += words[start + w];
        }
      } else {
        query = tw[rng.below(tw.size())];
        std::size_t extra = 1 + rng.below(3);
        for (std::size_t e = 0; e < extra; ++e) {
          query += ' ';
          query += rng.below(2) ? tw[rng.below(tw.size())]
                                : vocab[rng.below(vocab.size())];
        }
      }
      out += topic_ids()[i] + "\t" + query + "\n";
    }
  }
  return out;
}

inline std::string qrels_trec(std::uint64_t seed = 13,
                              std::size_t num_docs = 1000) {
  qvar::Rng rng(seed);
  std::string out;
  for (std::size_t i = 0; i < topic_ids().size(); ++i) {
    std::set<std::size_t> judged;
    // Judge mostly documents whose index is congruent to the topic slot,
    // i.e. the on-topic ones, plus a random smattering.
    while (judged.size() < 40) {
      std::size_t d = rng.below(2) ? (rng.below(num_docs / topic_ids().size()) *
                                          topic_ids().size() +
                                      i)
                                   : rng.below(num_docs);
      if (d < num_docs) judged.insert(d);
    }
    for (std::size_t d : judged)
      out += topic_ids()[i] + " 0 " + doc_name(d) + " " +
             std::to_string(rng.below(5)) + "\n";
  }
  return out;
}

struct Paths {
  std::filesystem::path dir;
  std::filesystem::path corpus;
  std::filesystem::path backstories;
  std::filesystem::path human_variants;
  std::filesystem::path qrels;
};

inline Paths write_all(const std::filesystem::path& dir,
                       std::size_t num_docs = 1000) {
  std::filesystem::create_directories(dir);
  Paths p;
  p.dir = dir;
  p.corpus = dir / "corpus.jsonl";
  p.backstories = dir / "backstories.tsv";
  p.human_variants = dir / "human.tsv";
  p.qrels = dir / "qrels.trec";
  qvar::atomic_write(p.corpus, corpus_jsonl(num_docs));
  qvar::atomic_write(p.backstories, backstories_tsv());
  qvar::atomic_write(p.human_variants, human_variants_tsv());
  qvar::atomic_write(p.qrels, qrels_trec(13, num_docs));
  return p;
}

// Random ranking of distinct doc ids drawn from a pool of `universe` docs.
inline std::vector<std::string> random_ranking(qvar::Rng& rng, std::size_t len,
                                               std::size_t universe) {
  std::vector<std::size_t> ids(universe);
  for (std::size_t i = 0; i < universe; ++i) ids[i] = i;
  for (std::size_t i = universe; i > 1; --i)
    std::swap(ids[i - 1], ids[rng.below(i)]);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len && i < universe; ++i)
    out.push_back(doc_name(ids[i]));
  return out;
}

inline qvar::RankedRun make_run(const std::string& topic,
                                const std::string& label, int variant_index,
                                const std::vector<std::string>& docs) {
  qvar::RankedRun run;
  run.topic_id = topic;
  run.set_label = label;
  run.variant_index = variant_index;
  double score = 10.0;
  for (const auto& d : docs) {
    run.entries.push_back({d, score});
    score -= 0.25;
  }
  return run;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qvar-tests-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixture
