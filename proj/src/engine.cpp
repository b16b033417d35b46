#include "qvar/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "qvar/analysis.hpp"
#include "qvar/bm25_kernel.hpp"

namespace qvar {

namespace {
constexpr char kIndexMagic[8] = {'Q', 'V', 'A', 'R', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kIndexVersion = 1;
}  // namespace

void IndexBuilder::add(const CorpusDocument& doc) {
  if (doc.doc_id.empty())
    throw ValidationError("build_index: empty doc_id");
  auto [it, inserted] = doc_lookup_.emplace(
      doc.doc_id, static_cast<std::uint32_t>(index_.doc_ids_.size()));
  if (!inserted)
    throw ValidationError("build_index: duplicate doc_id '" + doc.doc_id + "'");
  std::uint32_t doc_index = it->second;
  index_.doc_ids_.push_back(doc.doc_id);

  auto tokens = analyze(doc.text);
  index_.doc_lengths_.push_back(static_cast<std::uint32_t>(tokens.size()));

  std::unordered_map<std::string, std::uint32_t> tf;
  for (auto& t : tokens) ++tf[t];
  for (auto& [term, count] : tf) {
    InvertedIndex::PostingList& pl = index_.postings_[term];
    pl.docs.push_back(doc_index);  // docs added in increasing order
    pl.tfs.push_back(count);
  }
}

InvertedIndex IndexBuilder::finish() {
  if (index_.doc_ids_.empty())
    throw ValidationError("build_index: empty corpus");
  std::uint64_t total = 0;
  for (auto len : index_.doc_lengths_) total += len;
  index_.avg_doc_length_ =
      static_cast<double>(total) / static_cast<double>(index_.doc_ids_.size());
  index_.doc_lookup_ = std::move(doc_lookup_);
  return std::move(index_);
}

InvertedIndex InvertedIndex::build(const std::vector<CorpusDocument>& corpus) {
  IndexBuilder b;
  for (const auto& doc : corpus) b.add(doc);
  return b.finish();
}

InvertedIndex InvertedIndex::build_from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open corpus file");
  IndexBuilder b;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    CorpusDocument doc;
    if (line.front() == '{') {
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("id") || !j.contains("contents"))
        throw ParseError(path.string(), lineno,
                         "malformed JSONL document (need id, contents)");
      doc.doc_id = j["id"].is_string() ? j["id"].get<std::string>()
                                       : j["id"].dump();
      doc.text = j["contents"].get<std::string>();
    } else {
      auto cols = split_char(line, '\t');
      if (cols.size() != 2)
        throw ParseError(path.string(), lineno,
                         "expected TSV `doc_id<TAB>text`");
      doc.doc_id = std::string(trim(cols[0]));
      doc.text = std::string(cols[1]);
    }
    b.add(doc);
  }
  return b.finish();
}

std::optional<std::uint32_t> InvertedIndex::doc_index(
    const std::string& doc_id) const {
  auto it = doc_lookup_.find(doc_id);
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t InvertedIndex::df(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end()
             ? 0
             : static_cast<std::uint32_t>(it->second.docs.size());
}

const InvertedIndex::PostingList* InvertedIndex::postings(
    const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? nullptr : &it->second;
}

namespace {

template <typename T>
void put(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

void put_str(std::string& out, const std::string& s) {
  put(out, static_cast<std::uint32_t>(s.size()));
  out.append(s);
}

struct Reader {
  const std::string& data;
  std::size_t pos = 0;
  template <typename T>
  T get() {
    if (pos + sizeof(T) > data.size())
      throw ValidationError("index file truncated");
    T v;
    std::memcpy(&v, data.data() + pos, sizeof(T));
    pos += sizeof(T);
    return v;
  }
  std::string get_str() {
    auto n = get<std::uint32_t>();
    if (pos + n > data.size()) throw ValidationError("index file truncated");
    std::string s = data.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void InvertedIndex::save(const std::filesystem::path& path) const {
  std::string out;
  out.append(kIndexMagic, sizeof(kIndexMagic));
  put(out, kIndexVersion);
  put(out, analyzer_fingerprint());
  put(out, doc_count());
  put(out, avg_doc_length_);
  for (std::uint32_t i = 0; i < doc_count(); ++i) {
    put_str(out, doc_ids_[i]);
    put(out, doc_lengths_[i]);
  }
  put(out, static_cast<std::uint64_t>(postings_.size()));
  for (const auto& [term, pl] : postings_) {
    put_str(out, term);
    put(out, static_cast<std::uint32_t>(pl.docs.size()));
    out.append(reinterpret_cast<const char*>(pl.docs.data()),
               pl.docs.size() * sizeof(std::uint32_t));
    out.append(reinterpret_cast<const char*>(pl.tfs.data()),
               pl.tfs.size() * sizeof(std::uint32_t));
  }
  atomic_write(path, out);
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& path) {
  std::string data = read_file(path);
  if (data.size() < sizeof(kIndexMagic) ||
      std::memcmp(data.data(), kIndexMagic, sizeof(kIndexMagic)) != 0)
    throw ValidationError(path.string() + ": not an index file (bad magic)");
  Reader r{data, sizeof(kIndexMagic)};
  auto version = r.get<std::uint32_t>();
  if (version != kIndexVersion)
    throw ValidationError(path.string() + ": unsupported index version " +
                          std::to_string(version));
  auto fingerprint = r.get<std::uint64_t>();
  if (fingerprint != analyzer_fingerprint())
    throw ValidationError(path.string() +
                          ": analyzer fingerprint mismatch (index built with "
                          "a different stemmer/stop list)");
  InvertedIndex index;
  auto n = r.get<std::uint32_t>();
  index.avg_doc_length_ = r.get<double>();
  index.doc_ids_.reserve(n);
  index.doc_lengths_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    index.doc_ids_.push_back(r.get_str());
    index.doc_lengths_.push_back(r.get<std::uint32_t>());
    index.doc_lookup_.emplace(index.doc_ids_.back(), i);
  }
  auto terms = r.get<std::uint64_t>();
  for (std::uint64_t t = 0; t < terms; ++t) {
    std::string term = r.get_str();
    auto len = r.get<std::uint32_t>();
    InvertedIndex::PostingList pl;
    pl.docs.resize(len);
    pl.tfs.resize(len);
    if (r.pos + 2ULL * len * sizeof(std::uint32_t) > data.size())
      throw ValidationError("index file truncated");
    std::memcpy(pl.docs.data(), data.data() + r.pos, len * sizeof(std::uint32_t));
    r.pos += len * sizeof(std::uint32_t);
    std::memcpy(pl.tfs.data(), data.data() + r.pos, len * sizeof(std::uint32_t));
    r.pos += len * sizeof(std::uint32_t);
    index.postings_.emplace(std::move(term), std::move(pl));
  }
  return index;
}

double bm25_idf(std::uint32_t doc_count, std::uint32_t df) {
  return std::log(1.0 + (static_cast<double>(doc_count) - df + 0.5) /
                            (static_cast<double>(df) + 0.5));
}

double bm25_score(const InvertedIndex& index, const Bm25Params& params,
                  const std::vector<std::string>& query_terms,
                  const std::string& doc_id) {
  auto di = index.doc_index(doc_id);
  if (!di) throw ValidationError("bm25_score: unknown doc_id '" + doc_id + "'");
  double norm = params.k1 * (1.0 - params.b +
                             params.b * index.doc_length(*di) /
                                 index.avg_doc_length());
  double score = 0.0;
  for (const auto& term : query_terms) {
    const auto* pl = index.postings(term);
    if (!pl) continue;
    auto it = std::lower_bound(pl->docs.begin(), pl->docs.end(), *di);
    if (it == pl->docs.end() || *it != *di) continue;
    double tf = pl->tfs[static_cast<std::size_t>(it - pl->docs.begin())];
    double idf = bm25_idf(index.doc_count(), index.df(term));
    score += idf * tf * (params.k1 + 1.0) / (tf + norm);
  }
  return score;
}

RankedRun search(const InvertedIndex& index, const Bm25Params& params,
                 const std::string& query, std::size_t k) {
  if (k < 1) throw ValidationError("search: k must be >= 1");
  RankedRun run;
  auto terms = analyze(query);
  if (terms.empty()) {
    std::cerr << "warning: query analyzes to no terms: \"" << query << "\"\n";
    return run;
  }

  std::uint32_t n = index.doc_count();
  std::vector<double> norms(n);
  for (std::uint32_t i = 0; i < n; ++i)
    norms[i] = params.k1 * (1.0 - params.b +
                            params.b * index.doc_length(i) /
                                index.avg_doc_length());

  std::vector<double> acc(n, 0.0);
  auto kernel = bm25_accumulate_kernel();
  for (const auto& term : terms) {
    const auto* pl = index.postings(term);
    if (!pl) continue;
    double w = bm25_idf(n, static_cast<std::uint32_t>(pl->docs.size())) *
               (params.k1 + 1.0);
    kernel(pl->docs.data(), pl->tfs.data(), pl->docs.size(), norms.data(), w,
           acc.data());
  }

  std::vector<std::uint32_t> hits;
  for (std::uint32_t i = 0; i < n; ++i)
    if (acc[i] > 0.0) hits.push_back(i);
  auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (acc[a] != acc[b]) return acc[a] > acc[b];
    return index.doc_id(a) < index.doc_id(b);
  };
  if (hits.size() > k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<long>(k),
                      hits.end(), better);
    hits.resize(k);
  } else {
    std::sort(hits.begin(), hits.end(), better);
  }
  run.entries.reserve(hits.size());
  for (auto i : hits) run.entries.push_back({index.doc_id(i), acc[i]});
  return run;
}

std::vector<RankedRun> batch_run(const InvertedIndex& index,
                                 const Bm25Params& params,
                                 const std::vector<VariantSet>& sets,
                                 std::size_t k, unsigned jobs) {
  struct Task {
    const std::string* set_label;
    const std::string* topic_id;
    int variant_index;
    const std::string* query;
  };
  std::vector<Task> tasks;
  for (const auto& set : sets) {
    for (const auto& [topic, queries] : set.entries) {
      // Duplicate raw strings within a topic are searched once.
      std::vector<const std::string*> unique;
      for (const auto& q : queries) {
        bool seen = false;
        for (const auto* u : unique) seen = seen || (*u == q);
        if (!seen) unique.push_back(&q);
      }
      int vi = 0;
      for (const auto* q : unique)
        tasks.push_back({&set.label, &topic, vi++, q});
    }
  }

  std::vector<RankedRun> runs(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& t = tasks[i];
      RankedRun run = search(index, params, *t.query, k);
      run.topic_id = *t.topic_id;
      run.set_label = *t.set_label;
      run.variant_index = t.variant_index;
      runs[i] = std::move(run);
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  return runs;
}

}  // namespace qvar
