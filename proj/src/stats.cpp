#include "dataprism/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dataprism/data_model.hpp"
#include "dataprism/error.hpp"

namespace dataprism::stats {

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw ValidationError("percentile rank must lie in [0,100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_sd(std::span<const double> values) {
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) throw ValidationError("sample standard deviation needs at least 2 values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

BootstrapBounds bootstrap_bounds(std::vector<double> trial_scores) {
  if (trial_scores.size() < 2) throw ValidationError("bootstrap bounds need at least 2 trials");
  if (trial_scores.size() < kMinStableTrials) {
    warn("bootstrap bounds from only " + std::to_string(trial_scores.size()) +
         " trials; tail percentiles are unstable");
  }
  BootstrapBounds b;
  b.lower = percentile(trial_scores, 2.5);
  b.upper = percentile(trial_scores, 97.5);
  b.trial_scores = std::move(trial_scores);
  return b;
}

std::vector<std::vector<double>> split_scores(const ScoreMatrix& matrix,
                                              std::span<const sampling::Split> splits) {
  std::vector<std::vector<double>> out(matrix.num_models(), std::vector<double>(splits.size()));
  std::vector<std::size_t> cols;
  for (std::size_t s = 0; s < splits.size(); ++s) {
    const auto& ids = splits[s].instance_ids;
    if (ids.empty()) throw ValidationError("split '" + splits[s].label + "' is empty");
    cols.clear();
    for (const auto& id : ids) cols.push_back(matrix.column_of(id));
    for (std::size_t j = 0; j < matrix.num_models(); ++j) {
      const auto row = matrix.row(j);
      double sum = 0.0;
      for (std::size_t c : cols) sum += row[c];
      out[j][s] = 100.0 * sum / static_cast<double>(cols.size());
    }
  }
  return out;
}

std::vector<BootstrapBounds> random_bounds(const ScoreMatrix& matrix,
                                           std::span<const sampling::Split> random_splits) {
  auto scores = split_scores(matrix, random_splits);
  std::vector<BootstrapBounds> out;
  out.reserve(scores.size());
  for (auto& s : scores) out.push_back(bootstrap_bounds(std::move(s)));
  return out;
}

DimensionReport f1_variance_dimension(const ScoreMatrix& matrix, Dimension dimension,
                                      std::span<const sampling::Split> decile_splits,
                                      std::span<const BootstrapBounds> bounds) {
  if (bounds.size() != matrix.num_models()) {
    throw ValidationError("need one set of bounds per model");
  }
  if (decile_splits.empty()) throw ValidationError("no stratified splits for " + std::string(to_string(dimension)));
  auto scores = split_scores(matrix, decile_splits);
  DimensionReport rep;
  rep.dimension = dimension;
  int significant = 0;
  double sigma_sum = 0.0;
  for (std::size_t j = 0; j < matrix.num_models(); ++j) {
    ModelDimensionResult r;
    r.model_id = matrix.model_ids()[j];
    r.split_scores = std::move(scores[j]);
    r.sigma = population_sd(r.split_scores);
    const auto [lo, hi] = std::minmax_element(r.split_scores.begin(), r.split_scores.end());
    r.range = *hi - *lo;
    for (double s : r.split_scores) r.significant_count += bounds[j].outside(s) ? 1 : 0;
    significant += r.significant_count;
    sigma_sum += r.sigma;
    rep.per_model.push_back(std::move(r));
  }
  if (matrix.num_models() > 0) {
    rep.mean_sigma = sigma_sum / static_cast<double>(matrix.num_models());
    rep.pct_significant = 100.0 * significant /
                          static_cast<double>(matrix.num_models() * decile_splits.size());
  }
  return rep;
}

BootstrapReport f1_variance_report(
    const ScoreMatrix& matrix, std::span<const sampling::Split> random_splits,
    const std::map<Dimension, std::vector<sampling::Split>>& decile_splits) {
  BootstrapReport rep;
  rep.model_ids = matrix.model_ids();
  rep.bounds = random_bounds(matrix, random_splits);
  for (const auto& [dim, splits] : decile_splits) {
    rep.dimensions.push_back(f1_variance_dimension(matrix, dim, splits, rep.bounds));
  }
  return rep;
}

ModelScores aggregate_by_model(const ScoreMatrix& matrix) {
  ModelScores out;
  for (std::size_t j = 0; j < matrix.num_models(); ++j) {
    out[matrix.model_ids()[j]] = aggregate_score(matrix.row(j));
  }
  return out;
}

MetricDeltaReport metric_delta_report(const ModelScores& a, const ModelScores& b,
                                      std::string metric_a, std::string metric_b) {
  if (a.size() != b.size() ||
      !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) { return x.first == y.first; })) {
    throw ValidationError("metric delta needs the same models under both metrics");
  }
  if (a.empty()) throw ValidationError("metric delta needs at least one model");
  MetricDeltaReport rep;
  rep.metric_a = std::move(metric_a);
  rep.metric_b = std::move(metric_b);
  std::vector<double> deltas;
  for (const auto& [model, score] : a) {
    const double d = std::abs(score - b.at(model));
    rep.deltas[model] = d;
    deltas.push_back(d);
  }
  rep.mean = mean(deltas);
  rep.sigma = population_sd(deltas);
  return rep;
}

MetricDeltaReport metric_delta_report(const ScoreMatrix& a, const ScoreMatrix& b) {
  if (a.instance_ids() != b.instance_ids()) {
    throw ValidationError("metric delta needs the same instances under both metrics");
  }
  return metric_delta_report(aggregate_by_model(a), aggregate_by_model(b), a.metric_name(),
                             b.metric_name());
}

double kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("kendall_tau needs equal-length rankings");
  if (a.size() < 2) throw ValidationError("kendall_tau needs at least 2 items");
  const std::size_t n = a.size();
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double da = a[i] - a[k];
      const double db = b[i] - b[k];
      if (da == 0.0) ++ties_a;
      if (db == 0.0) ++ties_b;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto pairs = static_cast<long long>(n * (n - 1) / 2);
  const double denom =
      std::sqrt(static_cast<double>(pairs - ties_a) * static_cast<double>(pairs - ties_b));
  if (denom == 0.0) return 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

std::vector<double> rank_descending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
  std::vector<double> ranks(scores.size());
  std::size_t pos = 0;
  while (pos < order.size()) {
    std::size_t end = pos + 1;
    while (end < order.size() && scores[order[end]] == scores[order[pos]]) ++end;
    // Positions pos..end-1 are 1-based ranks pos+1..end.
    const double shared = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t k = pos; k < end; ++k) ranks[order[k]] = shared;
    pos = end;
  }
  return ranks;
}

namespace {

// Column s of a [model][split] score table.
std::vector<double> column(const std::vector<std::vector<double>>& table, std::size_t s) {
  std::vector<double> out;
  out.reserve(table.size());
  for (const auto& row : table) out.push_back(row[s]);
  return out;
}

}  // namespace

RankReport rank_variance_report(
    const ScoreMatrix& matrix, std::span<const sampling::Split> random_splits,
    const std::map<Dimension, std::vector<sampling::Split>>& decile_splits) {
  const std::size_t J = matrix.num_models();
  if (J < 2) throw ValidationError("ranking analysis needs at least 2 models");
  if (random_splits.empty()) throw ValidationError("ranking analysis needs random splits");

  const auto random_scores = split_scores(matrix, random_splits);
  std::vector<std::vector<double>> trial_ranks;
  trial_ranks.reserve(random_splits.size());
  std::vector<double> reference(J, 0.0);
  for (std::size_t t = 0; t < random_splits.size(); ++t) {
    trial_ranks.push_back(rank_descending(column(random_scores, t)));
    for (std::size_t j = 0; j < J; ++j) reference[j] += trial_ranks.back()[j];
  }
  for (double& r : reference) r /= static_cast<double>(random_splits.size());

  RankReport rep;
  rep.model_ids = matrix.model_ids();
  rep.reference_ranking = reference;
  std::vector<double> taus;
  taus.reserve(trial_ranks.size());
  for (const auto& ranks : trial_ranks) taus.push_back(kendall_tau(ranks, reference));
  rep.tau_bounds = bootstrap_bounds(std::move(taus));

  for (const auto& [dim, splits] : decile_splits) {
    RankDimensionResult r;
    r.dimension = dim;
    const auto scores = split_scores(matrix, splits);
    for (std::size_t s = 0; s < splits.size(); ++s) {
      const double tau = kendall_tau(rank_descending(column(scores, s)), reference);
      r.taus.push_back(tau);
      r.significant_count += rep.tau_bounds.outside(tau) ? 1 : 0;
    }
    rep.dimensions.push_back(std::move(r));
  }
  return rep;
}

}  // namespace dataprism::stats
