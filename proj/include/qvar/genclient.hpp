#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "qvar/corpusio.hpp"

namespace qvar {

// One-shot prompt: task description, worked example, target backstory.
struct PromptTemplate {
  std::string task_description;  // may reference {num_variants} / {avg_words}
  TopicBackstory example_backstory;
  std::vector<std::string> example_variants;
  int expected_variants = 30;
  double avg_words_per_query = 5.0;

  static PromptTemplate from_file(const std::filesystem::path& path);  // JSON
  std::uint64_t hash() const;
};

struct GenerationConfig {
  double temperature = 0.0;
  int max_output_tokens = 512;
  std::string model_name = "mock";
  int retries = 3;
  double request_timeout_seconds = 60.0;
  unsigned max_concurrent_requests = 4;
};

struct GenerationRecord {
  std::string topic_id;
  double temperature = 0.0;
  std::string raw_response;
  std::vector<std::string> parsed_variants;
  std::string timestamp;
  std::string backend;
  bool success = false;
  std::string error;
};

class TextBackend {
 public:
  virtual ~TextBackend() = default;
  virtual std::string name() const = 0;
  // Returns generated text; throws std::runtime_error on failure.
  virtual std::string complete(const std::string& prompt,
                               const GenerationConfig& config) = 0;
};

// Seeded offline backend emitting n-gram subsets of the prompt's target
// backstory, shaped to a plausible count/length distribution. Fully
// deterministic given (seed, prompt, temperature).
class MockBackend : public TextBackend {
 public:
  explicit MockBackend(std::uint64_t seed) : seed_(seed) {}
  std::string name() const override { return "mock"; }
  std::string complete(const std::string& prompt,
                       const GenerationConfig& config) override;

 private:
  std::uint64_t seed_;
};

// Completion-API client. The API key is read from `api_key_env` at request
// time and never persisted.
class HttpBackend : public TextBackend {
 public:
  HttpBackend(std::string base_url, std::string path, std::string api_key_env);
  std::string name() const override { return "http:" + base_url_; }
  std::string complete(const std::string& prompt,
                       const GenerationConfig& config) override;

 private:
  std::string base_url_;
  std::string path_;
  std::string api_key_env_;
};

std::string build_prompt(const PromptTemplate& tmpl,
                         const TopicBackstory& target);

// Splits lines, strips enumeration markers (1., 1), -, *), keeps duplicates.
std::vector<std::string> parse_response(const std::string& raw);

// One record per (backstory, temperature). Failed requests are retried then
// recorded as failures; existing successful records in records_path are
// skipped so interrupted batches resume. Records are appended as JSONL.
std::vector<GenerationRecord> generate_variants(
    const std::vector<TopicBackstory>& backstories, const PromptTemplate& tmpl,
    const GenerationConfig& base_config, const std::vector<double>& temperatures,
    TextBackend& backend, const std::filesystem::path& records_path);

std::vector<GenerationRecord> load_records(const std::filesystem::path& path);

std::string variant_set_label(double temperature);

// Collects successful records at one temperature into a VariantSet; topics
// with failures are omitted with a warning.
VariantSet records_to_variant_set(const std::vector<GenerationRecord>& records,
                                  double temperature);

}  // namespace qvar
