#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qvar/pipeline.hpp"
#include "qvar/util.hpp"

namespace {

struct Overrides {
  std::optional<std::string> config_path;
  std::optional<std::string> workdir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> corpus;
  std::optional<std::string> backstories;
  std::optional<std::string> human_variants;
  std::optional<std::string> qrels;
  std::optional<std::string> prompt_template;
  std::optional<std::string> backend;
  std::optional<bool> t0_case_sensitive;
};

qvar::ExperimentConfig make_config(const Overrides& ov) {
  qvar::ExperimentConfig config;
  if (ov.config_path) config = qvar::ExperimentConfig::load(*ov.config_path);
  if (ov.workdir) config.workdir = *ov.workdir;
  if (ov.seed) config.seed = *ov.seed;
  if (ov.jobs) config.jobs = *ov.jobs;
  if (ov.corpus) config.corpus = *ov.corpus;
  if (ov.backstories) config.backstories = *ov.backstories;
  if (ov.human_variants) config.human_variants = *ov.human_variants;
  if (ov.qrels) config.qrels = *ov.qrels;
  if (ov.prompt_template) config.prompt_template = *ov.prompt_template;
  if (ov.backend) config.backend = *ov.backend;
  if (ov.t0_case_sensitive) config.t0_case_sensitive = *ov.t0_case_sensitive;
  return config;
}

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config_path, "experiment config file");
  cmd->add_option("--workdir", ov.workdir, "working/output directory");
  cmd->add_option("--seed", ov.seed, "top-level random seed");
  cmd->add_option("--jobs", ov.jobs, "worker thread count");
  cmd->add_option("--corpus", ov.corpus, "corpus file (JSONL or TSV)");
  cmd->add_option("--backstories", ov.backstories, "backstories TSV");
  cmd->add_option("--human-variants", ov.human_variants, "human variants TSV");
  cmd->add_option("--qrels", ov.qrels, "TREC qrels file");
  cmd->add_option("--prompt-template", ov.prompt_template,
                  "prompt template JSON");
  cmd->add_option("--backend", ov.backend, "generation backend (mock|http)");
  cmd->add_flag("--t0-case-sensitive", ov.t0_case_sensitive,
                "keep case at normalization level T0");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"query-variant experiment toolkit"};
  app.require_subcommand(1);

  Overrides ov;
  using Handler = void (*)(const qvar::ExperimentConfig&);
  struct Sub {
    const char* name;
    const char* desc;
    Handler handler;
  };
  const Sub subs[] = {
      {"index", "build the inverted index from the corpus", qvar::cmd_index},
      {"generate", "generate query variants from backstories",
       qvar::cmd_generate},
      {"run", "produce BM25 runs for all variant sets", qvar::cmd_run},
      {"compare-queries", "query-set similarity across the T0-T4 cascade",
       qvar::cmd_compare_queries},
      {"compare-pools", "pool overlap and growth analysis",
       qvar::cmd_compare_pools},
      {"metrics", "effectiveness, RBO, pool properties and significance",
       qvar::cmd_metrics},
  };
  Handler selected = nullptr;
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.desc);
    add_common_flags(cmd, ov);
    Handler h = sub.handler;
    cmd->callback([&selected, h] { selected = h; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    qvar::ExperimentConfig config = make_config(ov);
    selected(config);
  } catch (const qvar::MissingInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
