#include "dataprism/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "dataprism/data_model.hpp"
#include "dataprism/error.hpp"
#include "dataprism/features.hpp"
#include "dataprism/ingest.hpp"
#include "dataprism/oodpredict.hpp"
#include "dataprism/sampling.hpp"
#include "dataprism/similarity.hpp"
#include "dataprism/stats.hpp"

namespace dataprism::report {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using ingest::format_double;

namespace {

ordered_json header(const RunConfig& config) {
  return ordered_json{{"version", kReportVersion}, {"seed", config.master_seed()}};
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_json(const fs::path& path, const ordered_json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write error on " + path.string());
}

// CSV with a leading "# schema_version=1 seed=N" comment line.
void write_csv(const fs::path& path, const RunConfig& config, const std::string& columns,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_out(path);
  out << "# schema_version=" << kReportVersion << " seed=" << config.master_seed() << '\n';
  out << columns << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  if (!out) throw IoError("write error on " + path.string());
}

std::string dim_name(Dimension d) { return std::string(to_string(d)); }

const fs::path& require(const std::optional<fs::path>& p, const char* flag) {
  if (!p) throw ValidationError(std::string("missing required option ") + flag);
  return *p;
}

// Maps each dataset instance to its row in `table`; the id sets must match.
void check_table_matches(const FeatureTable& table, const Dataset& dataset) {
  std::set<std::string> table_ids(table.ids.begin(), table.ids.end());
  for (const auto& inst : dataset.instances) {
    if (!table_ids.contains(inst.id)) {
      throw ValidationError("instance '" + inst.id + "' has no row in the feature table");
    }
  }
  if (table_ids.size() != dataset.size()) {
    throw ValidationError("feature table has " + std::to_string(table_ids.size()) +
                          " rows for " + std::to_string(dataset.size()) + " instances");
  }
}

std::map<Dimension, std::vector<sampling::Split>> decile_splits(const FeatureTable& table, int bins) {
  std::map<Dimension, std::vector<sampling::Split>> out;
  for (Dimension d : kAllDimensions) {
    out.emplace(d, sampling::stratified_deciles_degenerate(table, d, bins));
  }
  return out;
}

metrics::MetricKind alternate_metric(metrics::MetricKind m) {
  switch (m) {
    case metrics::MetricKind::qa_token_f1:
      return metrics::MetricKind::qa_exact;
    case metrics::MetricKind::qa_exact:
      return metrics::MetricKind::qa_token_f1;
    case metrics::MetricKind::cls_accuracy:
      return metrics::MetricKind::cls_macro_f1;
    case metrics::MetricKind::cls_macro_f1:
      return metrics::MetricKind::cls_accuracy;
  }
  return m;
}

stats::ModelScores model_scores(const Dataset& dataset, std::span<const PredictionSet> preds,
                                metrics::MetricKind metric) {
  if (metrics::per_instance(metric)) {
    return stats::aggregate_by_model(build_score_matrix(dataset, preds, metric));
  }
  std::vector<std::string> golds;
  for (const auto& inst : dataset.instances) golds.push_back(inst.gold.front());
  stats::ModelScores out;
  for (const auto& p : preds) {
    // Validates completeness the same way the per-instance path does.
    (void)score_instances(dataset, p, metrics::MetricKind::cls_accuracy);
    std::vector<std::string> predicted;
    for (const auto& inst : dataset.instances) predicted.push_back(p.predictions.at(inst.id));
    out[p.model_id] = 100.0 * metrics::cls_macro_f1(predicted, golds);
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!seed) throw ValidationError("--seed is required");
  if (bins < 2) throw ValidationError("--bins must be at least 2");
  if (trials < 2) throw ValidationError("--trials must be at least 2");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("--fraction must lie in (0,1]");
  for (const auto* p : {&instances, &predictions_dir, &traces, &pvi, &ppl, &features}) {
    if (*p && !fs::exists(**p)) throw IoError("input not found: " + (*p)->string());
  }
  for (const auto& [dim, path] : columns) {
    if (!fs::exists(path)) throw IoError("input not found: " + path.string());
  }
  if (metric && !metrics::applicable(*metric, task)) {
    throw ValidationError("metric " + std::string(metrics::to_string(*metric)) + " does not apply to " +
                          std::string(to_string(task)) + " data");
  }
}

metrics::MetricKind RunConfig::resolved_metric() const {
  if (metric) return *metric;
  return task == TaskKind::extractive_qa ? metrics::MetricKind::qa_token_f1
                                         : metrics::MetricKind::cls_accuracy;
}

std::uint64_t RunConfig::master_seed() const {
  if (!seed) throw ValidationError("--seed is required");
  return *seed;
}

FeatureTable cmd_features(const RunConfig& config) {
  config.validate();
  const Dataset dataset = ingest::parse_instances(require(config.instances, "--instances"), config.task);
  std::vector<std::string> ids;
  for (const auto& inst : dataset.instances) ids.push_back(inst.id);

  std::optional<FeatureTable> prior;
  std::unordered_map<std::string, std::size_t> prior_rows;
  if (config.features) {
    prior = ingest::read_feature_table(*config.features);
    for (std::size_t r = 0; r < prior->size(); ++r) prior_rows.emplace(prior->ids[r], r);
  }
  std::map<Dimension, fs::path> explicit_columns(config.columns.begin(), config.columns.end());

  std::array<std::optional<features::RawColumn>, kNumDimensions> columns;
  std::optional<irt::FitResult> irt_fit;
  std::vector<std::string> irt_models;
  for (Dimension d : kAllDimensions) {
    auto& slot = columns[static_cast<std::size_t>(d)];
    if (auto it = explicit_columns.find(d); it != explicit_columns.end()) {
      const auto records = ingest::parse_column(it->second);
      slot = features::RawColumn{features::ingested_column(dataset, records), Provenance::ingested};
      continue;
    }
    switch (d) {
      case Dimension::ambiguity:
        if (config.traces) {
          slot = features::RawColumn{features::ambiguity_column(dataset, ingest::parse_traces(*config.traces))};
        }
        break;
      case Dimension::difficulty:
        if (config.pvi) {
          slot = features::RawColumn{features::difficulty_column(dataset, ingest::parse_pvi(*config.pvi))};
        }
        break;
      case Dimension::discriminability:
        if (config.predictions_dir) {
          const auto preds = ingest::parse_predictions_dir(*config.predictions_dir);
          const auto responses = build_response_matrix(dataset, preds);
          auto irt_config = config.irt;
          irt_config.seed = config.master_seed();
          irt_fit = irt::fit_2pl(responses, irt_config);
          irt_models = responses.model_ids;
          slot = features::RawColumn{irt::discriminability_column(irt_fit->params)};
        }
        break;
      case Dimension::length:
        slot = features::RawColumn{features::length_column(dataset)};
        break;
      case Dimension::noise:
        if (!dataset.empty() && features::noise_computable(dataset)) {
          slot = features::RawColumn{features::noise_column(dataset)};
        }
        break;
      case Dimension::perplexity:
        if (config.ppl) {
          slot = features::RawColumn{features::perplexity_column(dataset, ingest::parse_perplexity(*config.ppl))};
        }
        break;
    }
    if (!slot && prior) {
      std::vector<double> values;
      for (const auto& id : ids) {
        auto it = prior_rows.find(id);
        if (it == prior_rows.end()) {
          throw ValidationError("instance '" + id + "' missing from " + config.features->string());
        }
        values.push_back(prior->column(d).raw[it->second]);
      }
      slot = features::RawColumn{std::move(values), Provenance::ingested};
    }
    if (!slot) throw ValidationError(dim_name(d) + " unavailable");
  }

  FeatureTable table = features::assemble_table(ids, std::move(columns));
  ingest::write_feature_table(table, config.out / "features.jsonl", config.master_seed());

  const auto corr = features::correlation_matrix(table);
  if (config.format == OutputFormat::json) {
    ordered_json doc = header(config);
    ordered_json dims = ordered_json::array();
    for (Dimension d : kAllDimensions) dims.push_back(dim_name(d));
    doc["dimensions"] = dims;
    ordered_json matrix = ordered_json::array();
    for (const auto& row : corr) {
      ordered_json r = ordered_json::array();
      for (const auto& v : row) r.push_back(optional_number(v));
      matrix.push_back(r);
    }
    doc["pearson_scaled"] = matrix;
    write_json(config.out / "correlations.json", doc);
  } else {
    std::string cols = "dimension";
    for (Dimension d : kAllDimensions) cols += "," + dim_name(d);
    std::vector<std::vector<std::string>> rows;
    for (Dimension a : kAllDimensions) {
      std::vector<std::string> row{dim_name(a)};
      for (const auto& v : corr[static_cast<std::size_t>(a)]) row.push_back(v ? format_double(*v) : "");
      rows.push_back(std::move(row));
    }
    write_csv(config.out / "correlations.csv", config, cols, rows);
  }

  if (irt_fit) {
    ordered_json doc = header(config);
    doc["iterations"] = config.irt.iterations;
    doc["learning_rate"] = config.irt.learning_rate;
    doc["objective"] = irt_fit->objective;
    doc["initial_objective"] = irt_fit->initial_objective;
    doc["best_iteration"] = irt_fit->best_iteration;
    ordered_json abilities = ordered_json::array();
    for (std::size_t j = 0; j < irt_models.size(); ++j) {
      abilities.push_back({{"model_id", irt_models[j]}, {"ability", irt_fit->params.ability[j]}});
    }
    doc["abilities"] = abilities;
    ordered_json flagged = ordered_json::array();
    for (std::size_t i : irt_fit->unidentifiable_items) flagged.push_back(ids[i]);
    doc["unidentifiable_items"] = flagged;
    write_json(config.out / "irt_fit.json", doc);
  }
  return table;
}

void cmd_analyze(const RunConfig& config) {
  config.validate();
  const Dataset dataset = ingest::parse_instances(require(config.instances, "--instances"), config.task);
  const auto preds = ingest::parse_predictions_dir(require(config.predictions_dir, "--predictions-dir"));
  const FeatureTable table = ingest::read_feature_table(require(config.features, "--features"));
  check_table_matches(table, dataset);
  const auto metric = config.resolved_metric();
  if (!metrics::per_instance(metric)) {
    throw ValidationError("cls_macro_f1 has no per-instance scores; use cls_accuracy for the analysis");
  }

  const ScoreMatrix matrix = build_score_matrix(dataset, preds, metric);
  const auto random = sampling::random_samples(dataset, config.fraction, config.trials, config.master_seed());
  const auto deciles = decile_splits(table, config.bins);

  const auto boot = stats::f1_variance_report(matrix, random, deciles);
  const std::string bounds_source = "random_" + std::to_string(config.trials);
  {
    ordered_json doc = header(config);
    doc["metric"] = metrics::to_string(metric);
    doc["bins"] = config.bins;
    doc["trials"] = config.trials;
    doc["fraction"] = config.fraction;
    ordered_json bounds = ordered_json::array();
    std::vector<double> random_sigmas;
    int random_outside = 0;
    for (std::size_t j = 0; j < boot.model_ids.size(); ++j) {
      const auto& b = boot.bounds[j];
      bounds.push_back({{"model_id", boot.model_ids[j]}, {"lower", b.lower}, {"upper", b.upper}});
      random_sigmas.push_back(stats::population_sd(b.trial_scores));
      for (double s : b.trial_scores) random_outside += b.outside(s) ? 1 : 0;
    }
    doc["bounds"] = bounds;
    ordered_json dims = ordered_json::array();
    for (const auto& d : boot.dimensions) {
      ordered_json per_model = ordered_json::array();
      for (const auto& m : d.per_model) {
        per_model.push_back({{"model_id", m.model_id},
                             {"split_scores", m.split_scores},
                             {"sigma", m.sigma},
                             {"range", m.range},
                             {"significant_count", m.significant_count}});
      }
      dims.push_back({{"dimension", dim_name(d.dimension)},
                      {"per_model", per_model},
                      {"mean_sigma", d.mean_sigma},
                      {"pct_significant", d.pct_significant},
                      {"bounds_source", bounds_source}});
    }
    doc["dimensions"] = dims;
    doc["random_baseline"] = {
        {"mean_sigma", stats::mean(random_sigmas)},
        {"pct_significant", 100.0 * random_outside /
                                static_cast<double>(boot.model_ids.size() * random.size())}};
    write_json(config.out / "bootstrap_report.json", doc);
  }

  {
    const auto rank = stats::rank_variance_report(matrix, random, deciles);
    ordered_json doc = header(config);
    doc["metric"] = metrics::to_string(metric);
    ordered_json ref = ordered_json::array();
    for (std::size_t j = 0; j < rank.model_ids.size(); ++j) {
      ref.push_back({{"model_id", rank.model_ids[j]}, {"mean_rank", rank.reference_ranking[j]}});
    }
    doc["reference_ranking"] = ref;
    doc["tau_bounds"] = {{"lower", rank.tau_bounds.lower}, {"upper", rank.tau_bounds.upper}};
    ordered_json dims = ordered_json::array();
    for (const auto& d : rank.dimensions) {
      dims.push_back({{"dimension", dim_name(d.dimension)},
                      {"taus", d.taus},
                      {"significant_count", d.significant_count},
                      {"num_splits", d.taus.size()},
                      {"bounds_source", bounds_source}});
    }
    doc["dimensions"] = dims;
    int outside = 0;
    for (double t : rank.tau_bounds.trial_scores) outside += rank.tau_bounds.outside(t) ? 1 : 0;
    doc["random_baseline"] = {
        {"expected_significant_per_bins",
         static_cast<double>(config.bins) * outside / static_cast<double>(rank.tau_bounds.trial_scores.size())}};
    write_json(config.out / "rank_report.json", doc);
  }

  {
    const auto alt = alternate_metric(metric);
    const auto delta = stats::metric_delta_report(stats::aggregate_by_model(matrix),
                                                  model_scores(dataset, preds, alt),
                                                  std::string(metrics::to_string(metric)),
                                                  std::string(metrics::to_string(alt)));
    ordered_json doc = header(config);
    doc["metric_a"] = delta.metric_a;
    doc["metric_b"] = delta.metric_b;
    ordered_json per_model = ordered_json::array();
    for (const auto& [model, d] : delta.deltas) per_model.push_back({{"model_id", model}, {"delta", d}});
    doc["per_model"] = per_model;
    doc["mean"] = delta.mean;
    doc["sigma"] = delta.sigma;
    doc["aggregation"] = "mean and population sd of per-model |score_a - score_b| on the full dataset";
    write_json(config.out / "metric_delta.json", doc);
  }

  // Decile curves: mean and spread across models per bin, plus the mean random band.
  double band_lo = 0.0, band_hi = 0.0;
  for (const auto& b : boot.bounds) {
    band_lo += b.lower;
    band_hi += b.upper;
  }
  band_lo /= static_cast<double>(boot.bounds.size());
  band_hi /= static_cast<double>(boot.bounds.size());

  std::vector<std::vector<std::string>> rows;
  ordered_json curves = ordered_json::array();
  for (const auto& d : boot.dimensions) {
    const auto& splits = deciles.at(d.dimension);
    const auto& raw = table.column(d.dimension).raw;
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < table.size(); ++r) row_of.emplace(table.ids[r], r);
    for (std::size_t k = 0; k < splits.size(); ++k) {
      std::vector<double> across;
      for (const auto& m : d.per_model) across.push_back(m.split_scores[k]);
      double lo = raw[row_of.at(splits[k].instance_ids.front())];
      double hi = lo;
      for (const auto& id : splits[k].instance_ids) {
        lo = std::min(lo, raw[row_of.at(id)]);
        hi = std::max(hi, raw[row_of.at(id)]);
      }
      const double mean_score = stats::mean(across);
      const double sd = stats::population_sd(across);
      rows.push_back({dim_name(d.dimension), std::to_string(k), std::to_string(splits[k].instance_ids.size()),
                      format_double(mean_score), format_double(sd), format_double(band_lo),
                      format_double(band_hi), format_double(lo), format_double(hi)});
      curves.push_back({{"dimension", dim_name(d.dimension)},
                        {"bin_index", k},
                        {"size", splits[k].instance_ids.size()},
                        {"mean_score", mean_score},
                        {"score_sd", sd},
                        {"random_lower", band_lo},
                        {"random_upper", band_hi},
                        {"min_raw", lo},
                        {"max_raw", hi}});
    }
  }
  if (config.format == OutputFormat::json) {
    ordered_json doc = header(config);
    doc["rows"] = curves;
    write_json(config.out / "decile_curves.json", doc);
  } else {
    write_csv(config.out / "decile_curves.csv", config,
              "dimension,bin_index,size,mean_score,score_sd,random_lower,random_upper,min_raw,max_raw", rows);
  }
}

void cmd_compare(const RunConfig& config, const CompareOptions& options) {
  config.validate();
  const FeatureTable a = ingest::read_feature_table(options.features_a);
  const FeatureTable b = ingest::read_feature_table(options.features_b);
  const auto sim = similarity::similarity_vector(a, b);

  ordered_json doc = header(config);
  doc["a"] = options.name_a.value_or(options.features_a.stem().string());
  doc["b"] = options.name_b.value_or(options.features_b.stem().string());
  ordered_json smd;
  for (Dimension d : kAllDimensions) smd[dim_name(d)] = sim.component(d);
  doc["smd"] = smd;
  doc["avg_abs"] = sim.avg_abs;
  if (!options.subsample_fractions.empty()) {
    ordered_json base = ordered_json::array();
    for (std::size_t k = 0; k < options.subsample_fractions.size(); ++k) {
      const double f = options.subsample_fractions[k];
      const double v = similarity::subsample_consistency(
          a, f, options.trials, sampling::child_seed(config.master_seed(), k));
      base.push_back({{"fraction", f}, {"trials", options.trials}, {"mean_avg_abs", v}});
    }
    doc["subsample_baseline"] = base;
  }
  write_json(config.out / "similarity.json", doc);
}

namespace {

ood::ScoreTable read_score_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ood::ScoreTable out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const auto obj = json::parse(line);
      const auto model = obj.at("model_id").get<std::string>();
      const auto dataset = obj.at("dataset").get<std::string>();
      const double score = obj.at("score").get<double>();
      if (!(score >= 0.0 && score <= 100.0)) throw ValidationError("score outside [0,100]");
      if (!out.emplace(std::make_pair(model, dataset), score).second) {
        throw ValidationError("duplicate score for (" + model + ", " + dataset + ")");
      }
    } catch (const json::exception& e) {
      throw ValidationError(where + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  return out;
}

std::vector<ood::PairSimilarity> read_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<ood::PairSimilarity> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    try {
      const auto obj = json::parse(line);
      std::array<double, kNumDimensions> comps{};
      const auto& smd = obj.at("smd");
      for (Dimension d : kAllDimensions) comps[static_cast<std::size_t>(d)] = smd.at(dim_name(d)).get<double>();
      out.push_back({{obj.at("a").get<std::string>(), obj.at("b").get<std::string>()},
                     similarity::from_components(comps)});
    } catch (const json::exception& e) {
      throw ValidationError(where + e.what());
    }
  }
  return out;
}

ordered_json pair_list(const std::vector<ood::DatasetPair>& pairs) {
  ordered_json out = ordered_json::array();
  for (const auto& [a, b] : pairs) out.push_back(ordered_json::array({a, b}));
  return out;
}

ordered_json importance_json(const std::array<double, kNumDimensions>& imp) {
  ordered_json out;
  for (Dimension d : kAllDimensions) out[dim_name(d)] = imp[static_cast<std::size_t>(d)];
  return out;
}

}  // namespace

void cmd_predict_ood(const RunConfig& config, const PredictOodOptions& options) {
  config.validate();
  const auto scores = read_score_table(options.scores);
  const auto pairs = read_pairs(options.pairs);
  const auto instances = ood::build_ood_instances(scores, pairs);
  const auto folds = ood::split_by_pairs(instances, options.holdout, options.repeats, config.master_seed());
  const auto rep = ood::run_folds(folds, options.ridge_eps);

  ordered_json doc = header(config);
  doc["num_instances"] = instances.size();
  doc["holdout"] = options.holdout;
  doc["repeats"] = options.repeats;
  ordered_json fold_docs = ordered_json::array();
  for (const auto& f : rep.folds) {
    fold_docs.push_back({{"held_out_pairs", pair_list(f.held_out_pairs)},
                         {"mad", f.model.mad},
                         {"r2", optional_number(f.model.r2)},
                         {"baseline_mad", f.baseline.mad},
                         {"baseline_r2", optional_number(f.baseline.r2)},
                         {"importance", importance_json(f.importance)}});
  }
  doc["folds"] = fold_docs;
  doc["aggregate"] = {{"mad", rep.mean_mad},
                      {"r2", optional_number(rep.mean_r2)},
                      {"baseline_mad", rep.mean_baseline_mad},
                      {"baseline_r2", optional_number(rep.mean_baseline_r2)}};
  doc["importance"] = importance_json(rep.importance);
  doc["importance_aggregation"] = "mean over folds";
  write_json(config.out / "ood_report.json", doc);
}

void cmd_compare_models(const RunConfig& config, const std::string& model_1, const std::string& model_2,
                        Dimension dimension) {
  config.validate();
  const Dataset dataset = ingest::parse_instances(require(config.instances, "--instances"), config.task);
  const auto preds = ingest::parse_predictions_dir(require(config.predictions_dir, "--predictions-dir"));
  const FeatureTable table = ingest::read_feature_table(require(config.features, "--features"));
  check_table_matches(table, dataset);
  const auto metric = config.resolved_metric();
  if (!metrics::per_instance(metric)) throw ValidationError("cls_macro_f1 has no per-instance scores");

  std::vector<PredictionSet> chosen;
  for (const auto& id : {model_1, model_2}) {
    auto it = std::find_if(preds.begin(), preds.end(), [&](const PredictionSet& p) { return p.model_id == id; });
    if (it == preds.end()) throw ValidationError("unknown model id '" + id + "'");
    chosen.push_back(*it);
  }
  if (model_1 == model_2) chosen.pop_back();
  const ScoreMatrix matrix = build_score_matrix(dataset, chosen, metric);
  const auto splits = sampling::stratified_deciles_degenerate(table, dimension, config.bins);
  const auto scores = stats::split_scores(matrix, splits);
  const std::size_t second = chosen.size() - 1;

  ordered_json rows_json = ordered_json::array();
  std::vector<std::vector<std::string>> rows;
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const double s1 = scores[0][k];
    const double s2 = scores[second][k];
    rows.push_back({std::to_string(k), std::to_string(splits[k].instance_ids.size()), format_double(s1),
                    format_double(s2), format_double(s1 - s2)});
    rows_json.push_back({{"bin_index", k},
                         {"size", splits[k].instance_ids.size()},
                         {"score_m1", s1},
                         {"score_m2", s2},
                         {"delta", s1 - s2}});
  }
  if (config.format == OutputFormat::json) {
    ordered_json doc = header(config);
    doc["metric"] = metrics::to_string(metric);
    doc["dimension"] = dim_name(dimension);
    doc["model_1"] = model_1;
    doc["model_2"] = model_2;
    doc["full_score_m1"] = aggregate_score(matrix.row(0));
    doc["full_score_m2"] = aggregate_score(matrix.row(second));
    doc["rows"] = rows_json;
    write_json(config.out / "compare_models.json", doc);
  } else {
    write_csv(config.out / "compare_models.csv", config, "bin_index,size,score_m1,score_m2,delta", rows);
  }
}

void cmd_sample(const RunConfig& config) {
  config.validate();
  const Dataset dataset = ingest::parse_instances(require(config.instances, "--instances"), config.task);
  const FeatureTable table = ingest::read_feature_table(require(config.features, "--features"));
  check_table_matches(table, dataset);
  std::vector<sampling::Split> all;
  for (auto& [dim, splits] : decile_splits(table, config.bins)) {
    for (auto& s : splits) all.push_back(std::move(s));
  }
  for (auto& s : sampling::random_samples(dataset, config.fraction, config.trials, config.master_seed())) {
    all.push_back(std::move(s));
  }
  sampling::write_splits(all, config.out / "splits.jsonl", config.master_seed());
}

}  // namespace dataprism::report
