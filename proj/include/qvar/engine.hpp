#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"

namespace qvar {

struct CorpusDocument {
  std::string doc_id;
  std::string text;
};

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;
};

class IndexBuilder;

// Immutable after build; concurrent searches are safe.
class InvertedIndex {
 public:
  static InvertedIndex build(const std::vector<CorpusDocument>& corpus);

  // Corpus file: JSONL {"id":..., "contents":...} or TSV `doc_id<TAB>text`,
  // decided per line; streamed, one document at a time.
  static InvertedIndex build_from_file(const std::filesystem::path& path);

  std::uint32_t doc_count() const { return static_cast<std::uint32_t>(doc_ids_.size()); }
  double avg_doc_length() const { return avg_doc_length_; }
  const std::string& doc_id(std::uint32_t i) const { return doc_ids_[i]; }
  std::uint32_t doc_length(std::uint32_t i) const { return doc_lengths_[i]; }
  std::optional<std::uint32_t> doc_index(const std::string& doc_id) const;
  std::uint32_t df(const std::string& term) const;
  std::size_t term_count() const { return postings_.size(); }

  struct PostingList {
    std::vector<std::uint32_t> docs;  // strictly increasing
    std::vector<std::uint32_t> tfs;
  };
  const PostingList* postings(const std::string& term) const;

  void save(const std::filesystem::path& path) const;
  static InvertedIndex load(const std::filesystem::path& path);

 private:
  friend class IndexBuilder;
  std::map<std::string, PostingList> postings_;
  std::vector<std::string> doc_ids_;
  std::vector<std::uint32_t> doc_lengths_;
  std::map<std::string, std::uint32_t> doc_lookup_;
  double avg_doc_length_ = 0.0;
};

// Single-writer, streaming index construction.
class IndexBuilder {
 public:
  void add(const CorpusDocument& doc);
  InvertedIndex finish();

 private:
  InvertedIndex index_;
  std::map<std::string, std::uint32_t> doc_lookup_;
};

// Lucene/Anserini BM25: idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)).
double bm25_idf(std::uint32_t doc_count, std::uint32_t df);

// Direct per-document score over already-analyzed query terms; duplicate
// terms contribute once per occurrence. Throws on unknown doc_id.
double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_terms,
                  const std::string& doc_id);

// Top-k by score, ties broken by ascending doc_id. Queries that analyze to
// nothing return an empty run (logged).
RankedRun search(const InvertedIndex& index, const Bm25Params& params,
                 const std::string& query, std::size_t k);

// One run per (set, topic, unique raw variant), deterministic order and
// content regardless of `jobs`.
std::vector<RankedRun> batch_run(const InvertedIndex& index,
                                 const Bm25Params& params,
                                 const std::vector<VariantSet>& sets,
                                 std::size_t k, unsigned jobs = 1);

}  // namespace qvar
