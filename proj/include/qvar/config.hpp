#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace qvar {

// Experiment configuration: a flat `key = value` config file ('#' comments,
// comma-separated lists) with command-line flag overrides applied on top.
struct ExperimentConfig {
  // inputs
  std::filesystem::path corpus;
  std::filesystem::path backstories;
  std::filesystem::path human_variants;
  std::filesystem::path qrels;
  std::filesystem::path prompt_template;
  std::filesystem::path workdir = "work";

  // retrieval
  double k1 = 0.9;
  double b = 0.4;
  std::size_t run_depth = 1000;

  // generation
  std::vector<double> temperatures = {0.0, 0.5, 1.0};
  std::string backend = "mock";  // mock | http
  std::string http_base_url;
  std::string http_path = "/v1/completions";
  std::string api_key_env = "QVAR_API_KEY";
  std::string model_name = "mock";
  int max_output_tokens = 512;
  int retries = 3;
  double request_timeout_seconds = 60.0;
  unsigned max_concurrent_requests = 4;

  // analysis
  std::vector<std::size_t> depth_grid = {10, 20, 30, 40, 50,
                                         60, 70, 80, 90, 100};
  std::size_t properties_depth = 10;
  std::size_t growth_depth = 10;
  std::size_t growth_orderings = 50;
  std::size_t growth_cutoff = 48;
  double rbp_p = 0.9;
  double rbo_p = 0.9;
  std::size_t rbo_depth = 1000;
  std::size_t metric_k = 10;
  int g_max = 4;
  bool exponential_gain = false;
  bool t0_case_sensitive = false;
  bool strict_qrels = false;
  std::set<std::string> excluded_topics;  // one-shot example topic added automatically

  // execution
  std::uint64_t seed = 42;
  unsigned jobs = 1;

  static ExperimentConfig load(const std::filesystem::path& path);
  std::uint64_t hash() const;

  // workdir layout
  std::filesystem::path index_path() const { return workdir / "index.qvix"; }
  std::filesystem::path records_path() const { return workdir / "records.jsonl"; }
  std::filesystem::path variants_path(const std::string& label) const {
    return workdir / ("variants-" + label + ".tsv");
  }
  std::filesystem::path runs_path(const std::string& label) const {
    return workdir / ("runs-" + label + ".trec");
  }
  std::filesystem::path report_path(const std::string& name) const {
    return workdir / (name + ".csv");
  }
  std::filesystem::path manifest_path() const { return workdir / "manifest.json"; }
};

}  // namespace qvar
