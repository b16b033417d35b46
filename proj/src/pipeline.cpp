#include "qvar/pipeline.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include <json.hpp>

#include "qvar/analysis.hpp"
#include "qvar/bm25_kernel.hpp"
#include "qvar/corpusio.hpp"
#include "qvar/engine.hpp"
#include "qvar/evalmetrics.hpp"
#include "qvar/genclient.hpp"
#include "qvar/pooling.hpp"
#include "qvar/stats.hpp"
#include "qvar/textnorm.hpp"

namespace qvar {

namespace {

using nlohmann::json;

void require_input(const std::filesystem::path& path, const std::string& what) {
  if (path.empty() || !std::filesystem::exists(path))
    throw MissingInputError("missing input: " + what + " (" + path.string() +
                            ")");
}

void ensure_workdir(const ExperimentConfig& config) {
  std::filesystem::create_directories(config.workdir);
}

void update_manifest(const ExperimentConfig& config, const std::string& command,
                     const std::vector<std::filesystem::path>& inputs) {
  json manifest = json::object();
  if (std::filesystem::exists(config.manifest_path())) {
    manifest = json::parse(read_file(config.manifest_path()), nullptr, false);
    if (manifest.is_discarded()) manifest = json::object();
  }
  json entry;
  entry["config_hash"] = hex64(config.hash());
  entry["seed"] = config.seed;
  json in = json::object();
  for (const auto& p : inputs)
    if (std::filesystem::exists(p)) in[p.string()] = hex64(fnv1a_file(p));
  entry["inputs"] = in;
  manifest[command] = entry;
  atomic_write(config.manifest_path(), manifest.dump(2) + "\n");
}

std::string csv_header_comment(const ExperimentConfig& config) {
  return "# seed=" + std::to_string(config.seed) +
         " config=" + hex64(config.hash()) + "\n";
}

// The one-shot example topic is excluded from every analysis stage. When no
// template was configured, the default one persisted by `generate` applies.
std::set<std::string> excluded_topics(const ExperimentConfig& config) {
  std::set<std::string> excluded = config.excluded_topics;
  std::filesystem::path tmpl_path = config.prompt_template;
  if (tmpl_path.empty()) tmpl_path = config.workdir / "prompt_template.json";
  if (std::filesystem::exists(tmpl_path)) {
    auto tmpl = PromptTemplate::from_file(tmpl_path);
    excluded.insert(tmpl.example_backstory.topic_id);
  }
  return excluded;
}

void apply_exclusions(VariantSet& set, const std::set<std::string>& excluded) {
  for (const auto& topic : excluded) set.entries.erase(topic);
}

std::vector<std::string> gpt_labels(const ExperimentConfig& config) {
  std::vector<std::string> labels;
  for (double t : config.temperatures) labels.push_back(variant_set_label(t));
  return labels;
}

VariantSet load_set(const ExperimentConfig& config,
                    const std::filesystem::path& path, const std::string& label,
                    const std::set<std::string>& excluded) {
  require_input(path, "variant set '" + label + "'");
  VariantSet set = parse_variants(path, label);
  apply_exclusions(set, excluded);
  return set;
}

std::vector<RankedRun> load_set_runs(const ExperimentConfig& config,
                                     const std::string& label,
                                     const std::set<std::string>& excluded) {
  auto path = config.runs_path(label);
  require_input(path, "run file for set '" + label + "'");
  std::vector<RankedRun> runs = parse_runs(path);
  std::erase_if(runs, [&](const RankedRun& r) {
    return excluded.contains(r.topic_id);
  });
  return runs;
}

PromptTemplate default_template(const ExperimentConfig& config,
                                const std::vector<TopicBackstory>& backstories) {
  PromptTemplate t;
  t.task_description =
      "Generate {num_variants} search engine queries that different people "
      "would issue for the information need described by the backstory. "
      "Queries should average about {avg_words} words, one query per line.";
  t.example_backstory = backstories.front();
  // Prefer the human variants of the example topic as the worked example.
  if (!config.human_variants.empty() &&
      std::filesystem::exists(config.human_variants)) {
    VariantSet human = parse_variants(config.human_variants, "human");
    auto it = human.entries.find(t.example_backstory.topic_id);
    if (it != human.entries.end()) {
      std::size_t n = std::min<std::size_t>(10, it->second.size());
      t.example_variants.assign(it->second.begin(), it->second.begin() + n);
    }
  }
  if (t.example_variants.empty()) {
    auto words = split_ws(t.example_backstory.text);
    std::string q;
    for (std::size_t i = 0; i < std::min<std::size_t>(4, words.size()); ++i)
      q += (i ? " " : "") + words[i];
    t.example_variants = {q};
  }
  return t;
}

}  // namespace

void cmd_index(const ExperimentConfig& config) {
  require_input(config.corpus, "corpus");
  ensure_workdir(config);
  InvertedIndex index = InvertedIndex::build_from_file(config.corpus);
  index.save(config.index_path());
  update_manifest(config, "index", {config.corpus});
  std::cout << "indexed " << index.doc_count() << " documents, "
            << index.term_count() << " terms -> " << config.index_path().string()
            << "\n";
}

void cmd_generate(const ExperimentConfig& config) {
  require_input(config.backstories, "backstories");
  ensure_workdir(config);
  auto backstories = parse_backstories(config.backstories);
  if (backstories.empty())
    throw ValidationError("generate: no backstories");

  PromptTemplate tmpl;
  if (!config.prompt_template.empty()) {
    require_input(config.prompt_template, "prompt template");
    tmpl = PromptTemplate::from_file(config.prompt_template);
  } else {
    tmpl = default_template(config, backstories);
    // Persist the generated default so it can be inspected and edited.
    json j{{"task_description", tmpl.task_description},
           {"example_topic_id", tmpl.example_backstory.topic_id},
           {"example_backstory", tmpl.example_backstory.text},
           {"example_variants", tmpl.example_variants},
           {"expected_variants", tmpl.expected_variants},
           {"avg_words_per_query", tmpl.avg_words_per_query}};
    atomic_write(config.workdir / "prompt_template.json", j.dump(2) + "\n");
  }

  std::vector<TopicBackstory> targets;
  for (const auto& b : backstories)
    if (b.topic_id != tmpl.example_backstory.topic_id) targets.push_back(b);

  GenerationConfig gen;
  gen.model_name = config.model_name;
  gen.max_output_tokens = config.max_output_tokens;
  gen.retries = config.retries;
  gen.request_timeout_seconds = config.request_timeout_seconds;
  gen.max_concurrent_requests = std::max(config.jobs, 1u);

  std::unique_ptr<TextBackend> backend;
  if (config.backend == "mock") {
    backend = std::make_unique<MockBackend>(config.seed);
  } else if (config.backend == "http") {
    if (config.http_base_url.empty())
      throw ValidationError("generate: http backend requires http_base_url");
    backend = std::make_unique<HttpBackend>(config.http_base_url,
                                            config.http_path,
                                            config.api_key_env);
  } else {
    throw ValidationError("generate: unknown backend '" + config.backend + "'");
  }

  auto records = generate_variants(targets, tmpl, gen, config.temperatures,
                                   *backend, config.records_path());
  std::cout << "template hash " << hex64(tmpl.hash()) << ", " << records.size()
            << " records\n";
  for (double t : config.temperatures) {
    VariantSet set = records_to_variant_set(records, t);
    atomic_write(config.variants_path(set.label), write_variants(set));
    std::cout << "wrote " << config.variants_path(set.label).string() << " ("
              << set.entries.size() << " topics)\n";
  }
  update_manifest(config, "generate",
                  {config.backstories, config.prompt_template});
}

void cmd_run(const ExperimentConfig& config) {
  require_input(config.index_path(), "index (run `qvar index` first)");
  require_input(config.human_variants, "human variants");
  ensure_workdir(config);
  auto excluded = excluded_topics(config);

  std::vector<VariantSet> sets;
  sets.push_back(
      load_set(config, config.human_variants, "human", excluded));
  for (const auto& label : gpt_labels(config))
    sets.push_back(load_set(config, config.variants_path(label), label,
                            excluded));

  InvertedIndex index = InvertedIndex::load(config.index_path());
  Bm25Params params{config.k1, config.b};
  std::cerr << "bm25 kernel: " << bm25_kernel_name() << "\n";
  auto runs = batch_run(index, params, sets, config.run_depth, config.jobs);

  for (const auto& set : sets) {
    std::vector<RankedRun> set_runs;
    for (const auto& r : runs)
      if (r.set_label == set.label) set_runs.push_back(r);
    atomic_write(config.runs_path(set.label), write_runs(set_runs));
    std::cout << "wrote " << config.runs_path(set.label).string() << " ("
              << set_runs.size() << " runs)\n";
  }
  std::vector<std::filesystem::path> inputs{config.index_path(),
                                            config.human_variants};
  for (const auto& label : gpt_labels(config))
    inputs.push_back(config.variants_path(label));
  update_manifest(config, "run", inputs);
}

void cmd_compare_queries(const ExperimentConfig& config) {
  require_input(config.human_variants, "human variants");
  ensure_workdir(config);
  auto excluded = excluded_topics(config);
  VariantSet human = load_set(config, config.human_variants, "human", excluded);
  NormOptions opts;
  opts.t0_case_sensitive = config.t0_case_sensitive;

  CsvBuilder csv({"set_label", "level", "topic_id", "jaccard", "coverage"});
  for (const auto& label : gpt_labels(config)) {
    VariantSet other =
        load_set(config, config.variants_path(label), label, excluded);
    // Topics the generator failed on are dropped from both sides, with a note.
    std::vector<std::string> missing;
    for (const auto& [topic, _] : human.entries)
      if (!other.entries.contains(topic)) missing.push_back(topic);
    VariantSet human_common = human;
    for (const auto& t : missing) {
      std::cerr << "warning: topic " << t << " missing from " << label
                << ", skipped in comparison\n";
      human_common.entries.erase(t);
    }
    auto sims = cascade_compare(human_common, other, all_norm_levels(), opts);
    for (const auto& sim : sims) {
      for (const auto& [topic, ts] : sim.per_topic)
        csv.row({label, to_string(sim.level), topic, format_real(ts.jaccard),
                 format_real(ts.coverage)});
      csv.row({label, to_string(sim.level), "ALL", format_real(sim.jaccard),
               format_real(sim.coverage)});
    }
  }
  atomic_write(config.report_path("query_similarity"),
               csv_header_comment(config) + csv.str());
  std::cout << "wrote " << config.report_path("query_similarity").string()
            << "\n";
  std::vector<std::filesystem::path> inputs{config.human_variants};
  for (const auto& label : gpt_labels(config))
    inputs.push_back(config.variants_path(label));
  update_manifest(config, "compare-queries", inputs);
}

void cmd_compare_pools(const ExperimentConfig& config) {
  require_input(config.qrels, "qrels");
  ensure_workdir(config);
  auto excluded = excluded_topics(config);
  JudgmentSet qrels =
      parse_qrels(config.qrels, config.g_max, config.strict_qrels);

  auto human_runs = load_set_runs(config, "human", excluded);

  CsvBuilder overlap_csv(
      {"setA", "setB", "depth", "filter", "topic_id", "jaccard"});
  for (const auto& label : gpt_labels(config)) {
    auto other_runs = load_set_runs(config, label, excluded);
    // Drop topics present on only one side (e.g. generation failures).
    std::set<std::string> topics_a, topics_b;
    for (const auto& r : human_runs) topics_a.insert(r.topic_id);
    for (const auto& r : other_runs) topics_b.insert(r.topic_id);
    auto common_runs = [&](const std::vector<RankedRun>& runs) {
      std::vector<RankedRun> out;
      for (const auto& r : runs)
        if (topics_a.contains(r.topic_id) && topics_b.contains(r.topic_id))
          out.push_back(r);
        else
          std::cerr << "warning: topic " << r.topic_id
                    << " missing from one side of human/" << label
                    << " pool overlap, skipped\n";
      return out;
    };
    auto human_common = common_runs(human_runs);
    auto other_common = common_runs(other_runs);
    for (const JudgmentSet* filter :
         std::initializer_list<const JudgmentSet*>{nullptr, &qrels}) {
      std::string filter_name = filter ? "relevant" : "all";
      auto points =
          pool_overlap(human_common, other_common, config.depth_grid, filter);
      for (const auto& pt : points) {
        for (const auto& [topic, j] : pt.per_topic)
          overlap_csv.row({"human", label, std::to_string(pt.depth),
                           filter_name, topic, format_real(j)});
        overlap_csv.row({"human", label, std::to_string(pt.depth), filter_name,
                         "ALL", format_real(pt.mean_jaccard)});
      }
    }
  }
  atomic_write(config.report_path("pool_overlap"),
               csv_header_comment(config) + overlap_csv.str());

  CsvBuilder growth_csv({"set", "depth", "num_variants", "mean_pool_size"});
  std::vector<std::string> labels{"human"};
  for (const auto& l : gpt_labels(config)) labels.push_back(l);
  for (const auto& label : labels) {
    auto runs = load_set_runs(config, label, excluded);
    auto curve = growth_curve(runs, config.growth_depth,
                              config.growth_orderings, config.seed,
                              config.growth_cutoff);
    for (const auto& pt : curve.points)
      growth_csv.row({label, std::to_string(curve.depth),
                      std::to_string(pt.num_variants),
                      format_real(pt.mean_pool_size)});
  }
  atomic_write(config.report_path("pool_growth"),
               csv_header_comment(config) + growth_csv.str());
  std::cout << "wrote " << config.report_path("pool_overlap").string() << " and "
            << config.report_path("pool_growth").string() << "\n";

  std::vector<std::filesystem::path> inputs{config.qrels};
  for (const auto& label : labels) inputs.push_back(config.runs_path(label));
  update_manifest(config, "compare-pools", inputs);
}

void cmd_metrics(const ExperimentConfig& config) {
  require_input(config.qrels, "qrels");
  ensure_workdir(config);
  auto excluded = excluded_topics(config);
  JudgmentSet qrels =
      parse_qrels(config.qrels, config.g_max, config.strict_qrels);

  std::vector<std::string> labels{"human"};
  for (const auto& l : gpt_labels(config)) labels.push_back(l);

  CsvBuilder metrics_csv({"set", "topic_id", "variant_index", "p_at_" +
                              std::to_string(config.metric_k),
                          "ndcg_at_" + std::to_string(config.metric_k),
                          "rbp_base", "rbp_residual"});
  CsvBuilder rbo_csv({"set", "topic_id", "mean_rbo", "num_pairs"});
  CsvBuilder summary_csv({"set", "aggregation",
                          "p_at_" + std::to_string(config.metric_k),
                          "ndcg_at_" + std::to_string(config.metric_k),
                          "rbp_base", "rbp_residual"});
  CsvBuilder props_csv({"set", "depth", "size", "frac_relevant",
                        "frac_unjudged"});

  // metric -> set -> topic -> per-topic mean, for significance testing.
  std::map<std::string, std::map<std::string, std::map<std::string, double>>>
      per_topic;

  for (const auto& label : labels) {
    auto runs = load_set_runs(config, label, excluded);
    if (runs.empty())
      throw ValidationError("metrics: no runs for set '" + label + "'");

    std::vector<EffectivenessScore> scores;
    for (const auto& run : runs) {
      EffectivenessScore s;
      s.topic_id = run.topic_id;
      s.set_label = label;
      s.variant_index = run.variant_index;
      s.p_at_k = precision_at_k(run, qrels, config.metric_k);
      s.ndcg_at_k =
          ndcg_at_k(run, qrels, config.metric_k, config.exponential_gain);
      auto r = rbp(run, qrels, config.rbp_p);
      s.rbp_base = r.base;
      s.rbp_residual = r.residual;
      scores.push_back(s);
      metrics_csv.row({label, s.topic_id, std::to_string(s.variant_index),
                       format_real(s.p_at_k), format_real(s.ndcg_at_k),
                       format_real(s.rbp_base), format_real(s.rbp_residual)});
    }

    std::map<std::string, std::vector<const RankedRun*>> by_topic;
    for (const auto& r : runs) by_topic[r.topic_id].push_back(&r);
    double rbo_sum = 0.0;
    std::size_t rbo_topics = 0;
    for (const auto& [topic, topic_runs] : by_topic) {
      if (topic_runs.size() < 2) {
        std::cerr << "warning: topic " << topic << " in set " << label
                  << " has fewer than 2 variants, skipped for RBO\n";
        continue;
      }
      auto score = topic_rbo(topic_runs, config.rbo_p, config.rbo_depth);
      rbo_csv.row({label, topic, format_real(score.mean_rbo),
                   std::to_string(score.num_pairs)});
      per_topic["rbo"][label][topic] = score.mean_rbo;
      rbo_sum += score.mean_rbo;
      ++rbo_topics;
    }
    if (rbo_topics)
      rbo_csv.row({label, "ALL", format_real(rbo_sum / rbo_topics),
                   std::to_string(rbo_topics)});

    auto agg = aggregate_scores(scores);
    summary_csv.row({label, "micro", format_real(agg.micro_p),
                     format_real(agg.micro_ndcg), format_real(agg.micro_rbp_base),
                     format_real(agg.micro_rbp_residual)});
    summary_csv.row({label, "macro", format_real(agg.macro_p),
                     format_real(agg.macro_ndcg), format_real(agg.macro_rbp_base),
                     format_real(agg.macro_rbp_residual)});

    auto pools = build_pools(runs, config.properties_depth);
    auto props = pool_properties(pools, qrels);
    props_csv.row({label, std::to_string(config.properties_depth),
                   format_real(props.size), format_real(props.frac_relevant),
                   format_real(props.frac_unjudged)});

    // Per-topic macro means feed the paired t-tests.
    std::map<std::string, std::pair<double, std::size_t>> topic_acc_p,
        topic_acc_ndcg, topic_acc_rbp;
    for (const auto& s : scores) {
      auto& ap = topic_acc_p[s.topic_id];
      ap.first += s.p_at_k;
      ++ap.second;
      auto& an = topic_acc_ndcg[s.topic_id];
      an.first += s.ndcg_at_k;
      ++an.second;
      auto& ar = topic_acc_rbp[s.topic_id];
      ar.first += s.rbp_base;
      ++ar.second;
    }
    for (const auto& [topic, acc] : topic_acc_p)
      per_topic["p_at_k"][label][topic] = acc.first / acc.second;
    for (const auto& [topic, acc] : topic_acc_ndcg)
      per_topic["ndcg_at_k"][label][topic] = acc.first / acc.second;
    for (const auto& [topic, acc] : topic_acc_rbp)
      per_topic["rbp_base"][label][topic] = acc.first / acc.second;
  }

  CsvBuilder sig_csv({"metric", "baseline", "comparison", "n", "t", "p_raw",
                      "p_adjusted", "significance"});
  for (auto& [metric, sets] : per_topic) {
    // Restrict every set to the topics all sets share.
    std::set<std::string> common;
    bool first = true;
    for (const auto& [label, topics] : sets) {
      std::set<std::string> here;
      for (const auto& [t, _] : topics) here.insert(t);
      if (first) {
        common = here;
        first = false;
      } else {
        std::set<std::string> inter;
        std::set_intersection(common.begin(), common.end(), here.begin(),
                              here.end(), std::inserter(inter, inter.begin()));
        common = inter;
      }
    }
    std::map<std::string, std::map<std::string, double>> aligned;
    for (const auto& [label, topics] : sets)
      for (const auto& t : common) aligned[label][t] = topics.at(t);
    if (common.size() < 2 || !aligned.contains("human")) continue;
    for (const auto& res : compare_to_baseline(aligned, "human", metric)) {
      sig_csv.row({res.metric, res.baseline, res.comparison,
                   std::to_string(res.n), format_real(res.t_statistic),
                   format_real(res.p_value_raw),
                   format_real(res.p_value_adjusted),
                   to_string(res.significance)});
    }
  }

  atomic_write(config.report_path("metrics"),
               csv_header_comment(config) + metrics_csv.str());
  atomic_write(config.report_path("rbo"),
               csv_header_comment(config) + rbo_csv.str());
  atomic_write(config.report_path("metrics_summary"),
               csv_header_comment(config) + summary_csv.str());
  atomic_write(config.report_path("pool_properties"),
               csv_header_comment(config) + props_csv.str());
  atomic_write(config.report_path("significance"),
               csv_header_comment(config) + sig_csv.str());
  std::cout << "wrote metrics, rbo, metrics_summary, pool_properties, "
               "significance reports under "
            << config.workdir.string() << "\n";

  std::vector<std::filesystem::path> inputs{config.qrels};
  for (const auto& label : labels) inputs.push_back(config.runs_path(label));
  update_manifest(config, "metrics", inputs);
}

}  // namespace qvar
