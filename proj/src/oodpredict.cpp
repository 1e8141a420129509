#include "dataprism/oodpredict.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "dataprism/error.hpp"
#include "dataprism/sampling.hpp"

namespace dataprism::ood {
namespace {

std::string input_name(std::size_t k) {
  if (k == 0) return "source_score";
  return "smd_" + std::string(to_string(kAllDimensions[k - 1]));
}

double lookup(const ScoreTable& scores, const std::string& model, const std::string& dataset) {
  auto it = scores.find({model, dataset});
  if (it == scores.end()) {
    throw ValidationError("no score for model '" + model + "' on dataset '" + dataset + "'");
  }
  return it->second;
}

}  // namespace

std::vector<OodInstance> build_ood_instances(const ScoreTable& scores,
                                             std::span<const PairSimilarity> pairs) {
  std::vector<std::string> models;
  for (const auto& [key, _] : scores) {
    if (models.empty() || models.back() != key.first) models.push_back(key.first);
  }
  std::vector<OodInstance> out;
  out.reserve(models.size() * pairs.size());
  for (const auto& model : models) {
    for (const auto& p : pairs) {
      OodInstance inst;
      inst.model_id = model;
      inst.pair = p.pair;
      inst.x[0] = lookup(scores, model, p.pair.first);
      for (std::size_t k = 0; k < kNumDimensions; ++k) inst.x[k + 1] = p.sim.smd[k];
      inst.y = lookup(scores, model, p.pair.second);
      out.push_back(std::move(inst));
    }
  }
  return out;
}

std::vector<Fold> split_by_pairs(std::span<const OodInstance> instances, std::size_t holdout,
                                 int repeats, std::uint64_t seed) {
  std::vector<DatasetPair> pairs;
  for (const auto& inst : instances) {
    if (std::find(pairs.begin(), pairs.end(), inst.pair) == pairs.end()) pairs.push_back(inst.pair);
  }
  if (holdout == 0 || holdout >= pairs.size()) {
    throw ValidationError("holding out " + std::to_string(holdout) + " of " +
                          std::to_string(pairs.size()) + " pairs leaves no training or test data");
  }
  if (repeats < 1) throw ValidationError("repeats must be at least 1");

  std::vector<Fold> folds;
  for (int r = 0; r < repeats; ++r) {
    std::mt19937_64 rng(sampling::child_seed(seed, static_cast<std::uint64_t>(r)));
    auto picked = sampling::sample_without_replacement(pairs.size(), holdout, rng);
    std::sort(picked.begin(), picked.end());
    Fold fold;
    std::set<DatasetPair> held;
    for (std::size_t k : picked) {
      fold.held_out_pairs.push_back(pairs[k]);
      held.insert(pairs[k]);
    }
    for (const auto& inst : instances) {
      (held.contains(inst.pair) ? fold.test : fold.train).push_back(inst);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

OodModel fit_ols(std::span<const OodInstance> train, double ridge_eps) {
  constexpr std::size_t P = kNumInputs;
  const std::size_t n = train.size();
  if (n < P + 1) {
    throw ValidationError("linear fit needs at least " + std::to_string(P + 1) + " rows, got " +
                          std::to_string(n));
  }
  OodModel model;
  model.num_train = n;
  double y_mean = 0.0;
  for (const auto& t : train) {
    for (std::size_t k = 0; k < P; ++k) model.input_mean[k] += t.x[k];
    y_mean += t.y;
  }
  for (double& m : model.input_mean) m /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  // Normal equations of the centered problem.
  std::array<std::array<double, P>, P> A{};
  std::array<double, P> rhs{};
  for (const auto& t : train) {
    std::array<double, P> xc;
    for (std::size_t k = 0; k < P; ++k) xc[k] = t.x[k] - model.input_mean[k];
    for (std::size_t r = 0; r < P; ++r) {
      rhs[r] += xc[r] * (t.y - y_mean);
      for (std::size_t c = 0; c < P; ++c) A[r][c] += xc[r] * xc[c];
    }
  }
  for (std::size_t k = 0; k < P; ++k) {
    model.input_sd[k] = std::sqrt(A[k][k] / static_cast<double>(n));
    A[k][k] += ridge_eps;
  }

  // Cholesky A = L L^T.
  std::array<std::array<double, P>, P> L{};
  for (std::size_t r = 0; r < P; ++r) {
    for (std::size_t c = 0; c <= r; ++c) {
      double s = A[r][c];
      for (std::size_t k = 0; k < c; ++k) s -= L[r][k] * L[c][k];
      if (r == c) {
        if (!(s > 1e-12 * A[r][r]) || !(s > 0.0) || !std::isfinite(s)) {
          throw ValidationError("normal equations singular at input '" + input_name(r) +
                                "' (degenerate or collinear column)");
        }
        L[r][r] = std::sqrt(s);
      } else {
        L[r][c] = s / L[c][c];
      }
    }
  }
  std::array<double, P> z{};
  for (std::size_t r = 0; r < P; ++r) {
    double s = rhs[r];
    for (std::size_t k = 0; k < r; ++k) s -= L[r][k] * z[k];
    z[r] = s / L[r][r];
  }
  for (std::size_t r = P; r-- > 0;) {
    double s = z[r];
    for (std::size_t k = r + 1; k < P; ++k) s -= L[k][r] * model.weights[k];
    model.weights[r] = s / L[r][r];
  }
  model.bias = y_mean;
  for (std::size_t k = 0; k < P; ++k) model.bias -= model.weights[k] * model.input_mean[k];
  return model;
}

double predict(const OodModel& model, std::span<const double> x) {
  if (x.size() != kNumInputs) {
    throw ValidationError("prediction input has " + std::to_string(x.size()) + " values, expected " +
                          std::to_string(kNumInputs));
  }
  double y = model.bias;
  for (std::size_t k = 0; k < kNumInputs; ++k) y += model.weights[k] * x[k];
  return y;
}

double baseline_identity(std::span<const double> x) {
  if (x.size() != kNumInputs) {
    throw ValidationError("baseline input has " + std::to_string(x.size()) + " values, expected " +
                          std::to_string(kNumInputs));
  }
  return x[0];
}

Evaluation evaluate(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.size() != targets.size()) throw ValidationError("prediction/target length mismatch");
  if (targets.empty()) throw ValidationError("cannot evaluate zero predictions");
  const double n = static_cast<double>(targets.size());
  double abs_sum = 0.0, ss_res = 0.0, y_mean = 0.0;
  for (double y : targets) y_mean += y;
  y_mean /= n;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = predictions[i] - targets[i];
    abs_sum += std::abs(r);
    ss_res += r * r;
    ss_tot += (targets[i] - y_mean) * (targets[i] - y_mean);
  }
  Evaluation e;
  e.mad = abs_sum / n;
  if (ss_tot > 0.0) e.r2 = 1.0 - ss_res / ss_tot;
  return e;
}

std::array<double, kNumDimensions> feature_importance(const OodModel& model) {
  std::array<double, kNumDimensions> out{};
  double max_w = 0.0;
  for (std::size_t k = 0; k < kNumDimensions; ++k) {
    out[k] = std::abs(model.weights[k + 1] * model.input_sd[k + 1]);
    max_w = std::max(max_w, out[k]);
  }
  if (max_w == 0.0) {
    warn("all similarity weights are zero; importance is all zeros");
    return out;
  }
  for (double& v : out) v /= max_w;
  return out;
}

OodReport run_folds(std::span<const Fold> folds, double ridge_eps) {
  if (folds.empty()) throw ValidationError("no folds to evaluate");
  OodReport rep;
  double r2_sum = 0.0, base_r2_sum = 0.0;
  int r2_count = 0, base_r2_count = 0;
  for (const auto& fold : folds) {
    const OodModel model = fit_ols(fold.train, ridge_eps);
    std::vector<double> pred, base, target;
    for (const auto& inst : fold.test) {
      pred.push_back(predict(model, inst.x));
      base.push_back(baseline_identity(inst.x));
      target.push_back(inst.y);
    }
    FoldResult fr;
    fr.held_out_pairs = fold.held_out_pairs;
    fr.model = evaluate(pred, target);
    fr.baseline = evaluate(base, target);
    fr.importance = feature_importance(model);
    rep.mean_mad += fr.model.mad;
    rep.mean_baseline_mad += fr.baseline.mad;
    if (fr.model.r2) {
      r2_sum += *fr.model.r2;
      ++r2_count;
    }
    if (fr.baseline.r2) {
      base_r2_sum += *fr.baseline.r2;
      ++base_r2_count;
    }
    for (std::size_t k = 0; k < kNumDimensions; ++k) rep.importance[k] += fr.importance[k];
    rep.folds.push_back(std::move(fr));
  }
  const double nf = static_cast<double>(folds.size());
  rep.mean_mad /= nf;
  rep.mean_baseline_mad /= nf;
  if (r2_count > 0) rep.mean_r2 = r2_sum / r2_count;
  if (base_r2_count > 0) rep.mean_baseline_r2 = base_r2_sum / base_r2_count;
  for (double& v : rep.importance) v /= nf;
  return rep;
}

}  // namespace dataprism::ood
