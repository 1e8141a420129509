// dataprism: command-line front end.
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "dataprism/error.hpp"
#include "dataprism/report.hpp"

namespace dp = dataprism;
namespace rep = dataprism::report;

namespace {

struct Shared {
  std::string task = "extractive_qa";
  std::string metric;
  std::string format = "csv";
  std::vector<std::string> columns;
  std::string instances, predictions_dir, traces, pvi, ppl, features;
};

void add_common(CLI::App* cmd, Shared& s, rep::RunConfig& c) {
  cmd->add_option("--task", s.task, "classification or extractive_qa")->capture_default_str();
  cmd->add_option("--seed", c.seed, "master seed for every random draw")->required();
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--format", s.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void add_inputs(CLI::App* cmd, Shared& s, rep::RunConfig& c) {
  cmd->add_option("--instances", s.instances, "instances.jsonl");
  cmd->add_option("--predictions-dir", s.predictions_dir, "directory of <model>.jsonl files");
  cmd->add_option("--features", s.features, "features.jsonl");
  cmd->add_option("--metric", s.metric, "qa_token_f1, qa_exact, cls_accuracy or cls_macro_f1");
  cmd->add_option("--bins", c.bins, "stratified bins per dimension")->capture_default_str();
  cmd->add_option("--trials", c.trials, "random baseline samples")->capture_default_str();
  cmd->add_option("--fraction", c.fraction, "random sample fraction")->capture_default_str();
}

void finish(const Shared& s, rep::RunConfig& c) {
  c.task = dp::parse_task_kind(s.task);
  if (!s.metric.empty()) {
    auto m = dp::metrics::parse_metric(s.metric);
    if (!m) throw dp::ValidationError("unknown metric '" + s.metric + "'");
    c.metric = *m;
  }
  c.format = s.format == "json" ? rep::OutputFormat::json : rep::OutputFormat::csv;
  auto set = [](std::optional<std::filesystem::path>& dst, const std::string& v) {
    if (!v.empty()) dst = v;
  };
  set(c.instances, s.instances);
  set(c.predictions_dir, s.predictions_dir);
  set(c.traces, s.traces);
  set(c.pvi, s.pvi);
  set(c.ppl, s.ppl);
  set(c.features, s.features);
  for (const auto& spec : s.columns) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw dp::ValidationError("--column expects dim=path, got '" + spec + "'");
    auto dim = dp::parse_dimension(spec.substr(0, eq));
    if (!dim) throw dp::ValidationError("unknown dimension '" + spec.substr(0, eq) + "'");
    c.columns.emplace_back(*dim, spec.substr(eq + 1));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data-centric evaluation: per-instance data dimensions and their effect on model scores"};
  app.require_subcommand(1);

  Shared s;
  rep::RunConfig config;

  auto* features = app.add_subcommand("features", "compute the six data dimensions");
  add_common(features, s, config);
  add_inputs(features, s, config);
  features->add_option("--traces", s.traces, "training-dynamics traces.jsonl");
  features->add_option("--pvi", s.pvi, "pvi.jsonl");
  features->add_option("--ppl", s.ppl, "perplexity.jsonl");
  features->add_option("--column", s.columns, "precomputed raw column, dim=path (repeatable)");
  features->add_option("--irt-iterations", config.irt.iterations)->capture_default_str();
  features->add_option("--irt-learning-rate", config.irt.learning_rate)->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "score variance and ranking consistency per dimension");
  add_common(analyze, s, config);
  add_inputs(analyze, s, config);

  rep::CompareOptions compare_opts;
  std::string name_a, name_b;
  auto* compare = app.add_subcommand("compare", "similarity vector of two feature tables");
  add_common(compare, s, config);
  compare->add_option("features_a", compare_opts.features_a)->required();
  compare->add_option("features_b", compare_opts.features_b)->required();
  compare->add_option("--name-a", name_a);
  compare->add_option("--name-b", name_b);
  compare->add_option("--subsample", compare_opts.subsample_fractions,
                      "fractions of features_a for in-distribution baselines");
  compare->add_option("--trials", compare_opts.trials)->capture_default_str();

  rep::PredictOodOptions ood_opts;
  auto* ood = app.add_subcommand("predict-ood", "predict out-of-distribution scores from similarity");
  add_common(ood, s, config);
  ood->add_option("--scores", ood_opts.scores, "{model_id,dataset,score} per line")->required();
  ood->add_option("--pairs", ood_opts.pairs, "{a,b,smd} per line")->required();
  ood->add_option("--holdout", ood_opts.holdout, "pairs held out per fold")->capture_default_str();
  ood->add_option("--repeats", ood_opts.repeats)->capture_default_str();
  ood->add_option("--ridge", ood_opts.ridge_eps)->capture_default_str();

  std::string model_1, model_2, dim_name;
  auto* cmp_models = app.add_subcommand("compare-models", "per-bin score difference of two models");
  add_common(cmp_models, s, config);
  add_inputs(cmp_models, s, config);
  cmp_models->add_option("model_1", model_1)->required();
  cmp_models->add_option("model_2", model_2)->required();
  cmp_models->add_option("--dimension", dim_name)->required();

  auto* sample = app.add_subcommand("sample", "export stratified and random splits");
  add_common(sample, s, config);
  add_inputs(sample, s, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    finish(s, config);
    if (features->parsed()) {
      rep::cmd_features(config);
    } else if (analyze->parsed()) {
      rep::cmd_analyze(config);
    } else if (compare->parsed()) {
      if (!name_a.empty()) compare_opts.name_a = name_a;
      if (!name_b.empty()) compare_opts.name_b = name_b;
      rep::cmd_compare(config, compare_opts);
    } else if (ood->parsed()) {
      rep::cmd_predict_ood(config, ood_opts);
    } else if (cmp_models->parsed()) {
      auto dim = dp::parse_dimension(dim_name);
      if (!dim) throw dp::ValidationError("unknown dimension '" + dim_name + "'");
      rep::cmd_compare_models(config, model_1, model_2, *dim);
    } else if (sample->parsed()) {
      rep::cmd_sample(config);
    }
  } catch (const dp::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const dp::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
