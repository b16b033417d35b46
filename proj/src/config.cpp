#include "qvar/config.hpp"

#include <map>
#include <sstream>

#include "qvar/util.hpp"

namespace qvar {

namespace {

std::map<std::string, std::string> parse_kv(const std::filesystem::path& path) {
  std::map<std::string, std::string> kv;
  std::string data = read_file(path);
  std::size_t lineno = 0;
  for (auto line : split_char(data, '\n')) {
    ++lineno;
    auto s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path.string(), lineno, "expected `key = value`");
    std::string key(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    if (key.empty())
      throw ParseError(path.string(), lineno, "empty key");
    kv[key] = value;
  }
  return kv;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  for (auto part : split_char(s, ','))
    if (!trim(part).empty()) out.push_back(std::stod(std::string(trim(part))));
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (auto part : split_char(s, ','))
    if (!trim(part).empty())
      out.push_back(std::stoull(std::string(trim(part))));
  return out;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ValidationError("config: invalid boolean '" + s + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  ExperimentConfig c;
  auto kv = parse_kv(path);
  auto take = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto* v = take("corpus")) c.corpus = *v;
  if (auto* v = take("backstories")) c.backstories = *v;
  if (auto* v = take("human_variants")) c.human_variants = *v;
  if (auto* v = take("qrels")) c.qrels = *v;
  if (auto* v = take("prompt_template")) c.prompt_template = *v;
  if (auto* v = take("workdir")) c.workdir = *v;
  if (auto* v = take("k1")) c.k1 = std::stod(*v);
  if (auto* v = take("b")) c.b = std::stod(*v);
  if (auto* v = take("run_depth")) c.run_depth = std::stoull(*v);
  if (auto* v = take("temperatures")) c.temperatures = parse_doubles(*v);
  if (auto* v = take("backend")) c.backend = *v;
  if (auto* v = take("http_base_url")) c.http_base_url = *v;
  if (auto* v = take("http_path")) c.http_path = *v;
  if (auto* v = take("api_key_env")) c.api_key_env = *v;
  if (auto* v = take("model_name")) c.model_name = *v;
  if (auto* v = take("max_output_tokens")) c.max_output_tokens = std::stoi(*v);
  if (auto* v = take("retries")) c.retries = std::stoi(*v);
  if (auto* v = take("request_timeout_seconds"))
    c.request_timeout_seconds = std::stod(*v);
  if (auto* v = take("max_concurrent_requests"))
    c.max_concurrent_requests = static_cast<unsigned>(std::stoul(*v));
  if (auto* v = take("depth_grid")) c.depth_grid = parse_sizes(*v);
  if (auto* v = take("properties_depth")) c.properties_depth = std::stoull(*v);
  if (auto* v = take("growth_depth")) c.growth_depth = std::stoull(*v);
  if (auto* v = take("growth_orderings")) c.growth_orderings = std::stoull(*v);
  if (auto* v = take("growth_cutoff")) c.growth_cutoff = std::stoull(*v);
  if (auto* v = take("rbp_p")) c.rbp_p = std::stod(*v);
  if (auto* v = take("rbo_p")) c.rbo_p = std::stod(*v);
  if (auto* v = take("rbo_depth")) c.rbo_depth = std::stoull(*v);
  if (auto* v = take("metric_k")) c.metric_k = std::stoull(*v);
  if (auto* v = take("g_max")) c.g_max = std::stoi(*v);
  if (auto* v = take("exponential_gain")) c.exponential_gain = parse_bool(*v);
  if (auto* v = take("t0_case_sensitive")) c.t0_case_sensitive = parse_bool(*v);
  if (auto* v = take("strict_qrels")) c.strict_qrels = parse_bool(*v);
  if (auto* v = take("excluded_topics"))
    for (auto part : split_char(*v, ','))
      if (!trim(part).empty()) c.excluded_topics.insert(std::string(trim(part)));
  if (auto* v = take("seed")) c.seed = std::stoull(*v);
  if (auto* v = take("jobs")) c.jobs = static_cast<unsigned>(std::stoul(*v));
  return c;
}

std::uint64_t ExperimentConfig::hash() const {
  std::ostringstream ss;
  ss << corpus << '|' << backstories << '|' << human_variants << '|' << qrels
     << '|' << prompt_template << '|' << k1 << '|' << b << '|' << run_depth
     << '|' << backend << '|' << model_name << '|' << properties_depth << '|'
     << growth_depth << '|' << growth_orderings << '|' << growth_cutoff << '|'
     << rbp_p << '|' << rbo_p << '|' << rbo_depth << '|' << metric_k << '|'
     << g_max << '|' << exponential_gain << '|' << t0_case_sensitive << '|'
     << strict_qrels << '|' << seed;
  for (double t : temperatures) ss << '|' << t;
  for (auto d : depth_grid) ss << '|' << d;
  for (const auto& t : excluded_topics) ss << '|' << t;
  return fnv1a(ss.str());
}

}  // namespace qvar
