#include "qvar/genclient.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "qvar/util.hpp"

namespace qvar {

using nlohmann::json;

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
  json j = json::parse(read_file(path));
  PromptTemplate t;
  t.task_description = j.at("task_description").get<std::string>();
  t.example_backstory.topic_id = j.at("example_topic_id").get<std::string>();
  t.example_backstory.text = j.at("example_backstory").get<std::string>();
  t.example_variants = j.at("example_variants").get<std::vector<std::string>>();
  if (j.contains("expected_variants"))
    t.expected_variants = j["expected_variants"].get<int>();
  if (j.contains("avg_words_per_query"))
    t.avg_words_per_query = j["avg_words_per_query"].get<double>();
  return t;
}

std::uint64_t PromptTemplate::hash() const {
  std::uint64_t h = fnv1a(task_description);
  h = fnv1a(example_backstory.topic_id, h);
  h = fnv1a(example_backstory.text, h);
  for (const auto& v : example_variants) h = fnv1a(v, fnv1a("|", h));
  h = fnv1a(std::to_string(expected_variants), h);
  h = fnv1a(std::to_string(avg_words_per_query), h);
  return h;
}

namespace {

std::string replace_all(std::string s, std::string_view from,
                        std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string build_prompt(const PromptTemplate& tmpl,
                         const TopicBackstory& target) {
  if (target.topic_id == tmpl.example_backstory.topic_id)
    throw ValidationError(
        "build_prompt: target topic equals the one-shot example topic (" +
        target.topic_id + ")");
  std::string task = tmpl.task_description;
  task = replace_all(task, "{num_variants}",
                     std::to_string(tmpl.expected_variants));
  task = replace_all(task, "{avg_words}",
                     format_number(tmpl.avg_words_per_query));

  std::string prompt = task;
  prompt += "\n\nBackstory: " + tmpl.example_backstory.text + "\nQueries:\n";
  for (const auto& v : tmpl.example_variants) prompt += v + "\n";
  prompt += "\nBackstory: " + target.text + "\nQueries:\n";
  return prompt;
}

std::vector<std::string> parse_response(const std::string& raw) {
  std::vector<std::string> out;
  for (auto line_view : split_char(raw, '\n')) {
    std::string_view line = trim(line_view);
    if (line.empty()) continue;
    // Strip enumeration markers: "12.", "3)", "-", "*".
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
      ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
      line = trim(line.substr(i + 1));
    } else if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
      line = trim(line.substr(1));
    }
    if (!line.empty()) out.emplace_back(line);
  }
  if (out.empty()) throw ValidationError("parse_response: empty response");
  return out;
}

std::string MockBackend::complete(const std::string& prompt,
                                  const GenerationConfig& config) {
  // The target backstory is the last "Backstory:" section of the prompt.
  auto pos = prompt.rfind("Backstory:");
  if (pos == std::string::npos)
    throw std::runtime_error("mock backend: no backstory in prompt");
  auto end = prompt.find('\n', pos);
  std::string backstory =
      prompt.substr(pos + 10, end == std::string::npos ? std::string::npos
                                                       : end - pos - 10);
  std::vector<std::string> words;
  std::string cur;
  for (char c : backstory) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      words.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(cur);
  if (words.empty()) throw std::runtime_error("mock backend: empty backstory");

  std::uint64_t temp_bits = static_cast<std::uint64_t>(config.temperature * 1000.0);
  Rng rng(fnv1a(backstory, seed_) ^ (temp_bits * 0x9e3779b97f4a7c15ULL));

  // Higher temperature, more and more varied queries.
  std::size_t count = 8 + rng.below(8 + temp_bits / 100);
  std::string out;
  for (std::size_t q = 0; q < count; ++q) {
    std::size_t len = std::min<std::size_t>(words.size(), 2 + rng.below(5));
    std::size_t start = rng.below(words.size() - len + 1);
    out += std::to_string(q + 1) + ". ";
    for (std::size_t w = 0; w < len; ++w) {
      if (w) out += ' ';
      out += words[start + w];
    }
    out += '\n';
  }
  return out;
}

HttpBackend::HttpBackend(std::string base_url, std::string path,
                         std::string api_key_env)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      api_key_env_(std::move(api_key_env)) {}

std::string HttpBackend::complete(const std::string& prompt,
                                  const GenerationConfig& config) {
  httplib::Client client(base_url_);
  client.set_read_timeout(std::chrono::milliseconds(
      static_cast<int>(config.request_timeout_seconds * 1000)));
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str()))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  json request{{"model", config.model_name},
               {"prompt", prompt},
               {"temperature", config.temperature},
               {"max_tokens", config.max_output_tokens}};
  auto res = client.Post(path_, headers, request.dump(), "application/json");
  if (!res)
    throw std::runtime_error("http backend: request failed: " +
                             httplib::to_string(res.error()));
  if (res->status == 429)
    throw std::runtime_error("http backend: rate limited (429)");
  if (res->status != 200)
    throw std::runtime_error("http backend: status " +
                             std::to_string(res->status));
  json body = json::parse(res->body, nullptr, false);
  if (body.is_discarded())
    throw std::runtime_error("http backend: non-JSON response");
  if (body.contains("choices") && body["choices"].is_array() &&
      !body["choices"].empty()) {
    const auto& choice = body["choices"][0];
    if (choice.contains("text")) return choice["text"].get<std::string>();
    if (choice.contains("message") && choice["message"].contains("content"))
      return choice["message"]["content"].get<std::string>();
  }
  if (body.contains("text")) return body["text"].get<std::string>();
  throw std::runtime_error("http backend: no text field in response");
}

namespace {

json record_to_json(const GenerationRecord& r) {
  return json{{"topic_id", r.topic_id},
              {"temperature", r.temperature},
              {"raw_response", r.raw_response},
              {"parsed_variants", r.parsed_variants},
              {"timestamp", r.timestamp},
              {"backend", r.backend},
              {"success", r.success},
              {"error", r.error}};
}

GenerationRecord record_from_json(const json& j) {
  GenerationRecord r;
  r.topic_id = j.at("topic_id").get<std::string>();
  r.temperature = j.at("temperature").get<double>();
  r.raw_response = j.value("raw_response", "");
  r.parsed_variants = j.value("parsed_variants", std::vector<std::string>{});
  r.timestamp = j.value("timestamp", "");
  r.backend = j.value("backend", "");
  r.success = j.value("success", false);
  r.error = j.value("error", "");
  return r;
}

std::string now_iso8601() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::vector<GenerationRecord> load_records(const std::filesystem::path& path) {
  std::vector<GenerationRecord> out;
  if (!std::filesystem::exists(path)) return out;
  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ParseError(path.string(), lineno, "malformed record JSON");
    out.push_back(record_from_json(j));
  }
  return out;
}

std::vector<GenerationRecord> generate_variants(
    const std::vector<TopicBackstory>& backstories, const PromptTemplate& tmpl,
    const GenerationConfig& base_config,
    const std::vector<double>& temperatures, TextBackend& backend,
    const std::filesystem::path& records_path) {
  std::vector<GenerationRecord> existing = load_records(records_path);
  std::set<std::pair<std::string, double>> done;
  for (const auto& r : existing)
    if (r.success) done.emplace(r.topic_id, r.temperature);

  struct Task {
    const TopicBackstory* backstory;
    double temperature;
  };
  std::vector<Task> tasks;
  for (const auto& b : backstories) {
    if (b.topic_id == tmpl.example_backstory.topic_id)
      throw ValidationError(
          "generate_variants: example topic must be excluded from input (" +
          b.topic_id + ")");
    for (double temp : temperatures)
      if (!done.contains({b.topic_id, temp})) tasks.push_back({&b, temp});
  }

  std::vector<GenerationRecord> fresh(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;
  std::ofstream records_out(records_path, std::ios::app);

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      const Task& task = tasks[i];
      GenerationConfig config = base_config;
      config.temperature = task.temperature;
      GenerationRecord rec;
      rec.topic_id = task.backstory->topic_id;
      rec.temperature = task.temperature;
      rec.backend = backend.name();
      rec.timestamp = now_iso8601();
      std::string prompt = build_prompt(tmpl, *task.backstory);
      for (int attempt = 0; attempt <= config.retries; ++attempt) {
        if (attempt > 0)
          std::this_thread::sleep_for(
              std::chrono::milliseconds(100 << std::min(attempt, 6)));
        try {
          rec.raw_response = backend.complete(prompt, config);
          rec.parsed_variants = parse_response(rec.raw_response);
          rec.success = true;
          rec.error.clear();
          break;
        } catch (const std::exception& e) {
          rec.success = false;
          rec.error = e.what();
        }
      }
      {
        std::lock_guard<std::mutex> lock(io_mutex);
        records_out << record_to_json(rec).dump() << '\n';
        records_out.flush();
      }
      fresh[i] = std::move(rec);
    }
  };
  unsigned jobs = std::max(1u, base_config.max_concurrent_requests);
  if (jobs == 1 || tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  std::vector<GenerationRecord> all = std::move(existing);
  bool any_success = false;
  for (auto& r : fresh) {
    any_success = any_success || r.success;
    all.push_back(std::move(r));
  }
  for (const auto& r : all) any_success = any_success || r.success;
  if (!any_success && !all.empty())
    throw std::runtime_error("generate_variants: all requests failed");
  return all;
}

std::string variant_set_label(double temperature) {
  return "gpt-t" + format_number(temperature);
}

VariantSet records_to_variant_set(const std::vector<GenerationRecord>& records,
                                  double temperature) {
  VariantSet set;
  set.label = variant_set_label(temperature);
  bool any = false;
  for (const auto& r : records) {
    if (r.temperature != temperature) continue;
    any = true;
    if (!r.success) {
      std::cerr << "warning: topic " << r.topic_id << " at temperature "
                << temperature << " failed: " << r.error << "\n";
      continue;
    }
    auto& list = set.entries[r.topic_id];
    list.insert(list.end(), r.parsed_variants.begin(), r.parsed_variants.end());
  }
  if (!any || set.entries.empty())
    throw ValidationError(
        "records_to_variant_set: no successful records at temperature " +
        format_number(temperature));
  return set;
}

}  // namespace qvar
