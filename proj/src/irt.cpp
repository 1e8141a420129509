#include "dataprism/irt.hpp"

#include <cmath>
#include <numbers>

#include "dataprism/error.hpp"

namespace dataprism::irt {
namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double log_normal_density(double x, double var) {
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * x * x / var;
}

struct Gradient {
  std::vector<double> ability;
  std::vector<double> difficulty;
  std::vector<double> log_discrimination;
};

// Objective and gradient at `p` in one pass. Accumulation order is fixed
// (models outer, items inner) so results are reproducible bit for bit.
double objective_and_gradient(const IrtParams& p, const ResponseMatrix& m, const PriorConfig& prior,
                              Gradient& g) {
  const std::size_t J = m.num_models();
  const std::size_t I = m.num_items();
  std::fill(g.ability.begin(), g.ability.end(), 0.0);
  std::fill(g.difficulty.begin(), g.difficulty.end(), 0.0);
  std::fill(g.log_discrimination.begin(), g.log_discrimination.end(), 0.0);

  std::vector<double> a(I);
  for (std::size_t i = 0; i < I; ++i) a[i] = std::exp(p.log_discrimination[i]);

  double ll = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const double theta = p.ability[j];
    double g_theta = 0.0;
    for (std::size_t i = 0; i < I; ++i) {
      const double gap = theta - p.difficulty[i];
      const double z = a[i] * gap;
      const double y = m.at(j, i);
      ll += y * z - softplus(z);
      const double r = y - sigmoid(z);
      g_theta += a[i] * r;
      g.difficulty[i] -= a[i] * r;
      g.log_discrimination[i] += a[i] * r * gap;
    }
    g.ability[j] = g_theta;
  }

  double lp = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    lp += log_normal_density(p.ability[j], prior.ability_var);
    g.ability[j] -= p.ability[j] / prior.ability_var;
  }
  for (std::size_t i = 0; i < I; ++i) {
    lp += log_normal_density(p.difficulty[i], prior.difficulty_var);
    lp += log_normal_density(p.log_discrimination[i], prior.log_discrimination_var);
    g.difficulty[i] -= p.difficulty[i] / prior.difficulty_var;
    g.log_discrimination[i] -= p.log_discrimination[i] / prior.log_discrimination_var;
  }
  return ll + lp;
}

struct Adam {
  explicit Adam(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad, double lr, int t,
            std::size_t offset) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    for (std::size_t k = 0; k < params.size(); ++k) {
      double& mk = m[offset + k];
      double& vk = v[offset + k];
      mk = beta1 * mk + (1.0 - beta1) * grad[k];
      vk = beta2 * vk + (1.0 - beta2) * grad[k] * grad[k];
      params[k] += lr * (mk / c1) / (std::sqrt(vk / c2) + eps);
    }
  }

  std::vector<double> m, v;
};

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void ResponseMatrix::validate() const {
  if (responses.size() != model_ids.size() * instance_ids.size()) {
    throw ValidationError("response matrix has " + std::to_string(responses.size()) +
                          " entries, expected " + std::to_string(model_ids.size()) + " x " +
                          std::to_string(instance_ids.size()));
  }
  for (auto r : responses) {
    if (r > 1) throw ValidationError("response matrix entries must be 0 or 1");
  }
}

std::vector<std::size_t> ResponseMatrix::constant_items() const {
  std::vector<std::size_t> out;
  if (num_models() == 0) return out;
  for (std::size_t i = 0; i < num_items(); ++i) {
    bool constant = true;
    for (std::size_t j = 1; j < num_models() && constant; ++j) constant = at(j, i) == at(0, i);
    if (constant) out.push_back(i);
  }
  return out;
}

double IrtParams::discrimination(std::size_t item) const {
  return std::exp(log_discrimination[item]);
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double predict_prob(const IrtParams& params, std::size_t model, std::size_t item) {
  return sigmoid(params.discrimination(item) * (params.ability[model] - params.difficulty[item]));
}

double penalized_loglik(const IrtParams& params, const ResponseMatrix& matrix,
                        const PriorConfig& prior) {
  Gradient g{std::vector<double>(matrix.num_models()), std::vector<double>(matrix.num_items()),
             std::vector<double>(matrix.num_items())};
  return objective_and_gradient(params, matrix, prior, g);
}

FitResult fit_2pl(const ResponseMatrix& matrix, const FitConfig& config) {
  matrix.validate();
  const std::size_t J = matrix.num_models();
  const std::size_t I = matrix.num_items();
  if (J < 2 || I < 2) {
    throw ValidationError("2PL fit needs at least 2 models and 2 items, got " + std::to_string(J) +
                          " x " + std::to_string(I));
  }

  IrtParams current{std::vector<double>(J, 0.0), std::vector<double>(I, 0.0),
                    std::vector<double>(I, 0.0)};
  Gradient g{std::vector<double>(J), std::vector<double>(I), std::vector<double>(I)};
  Adam adam(J + 2 * I);

  FitResult result;
  result.unidentifiable_items = matrix.constant_items();
  if (!result.unidentifiable_items.empty()) {
    warn(std::to_string(result.unidentifiable_items.size()) +
         " item(s) answered identically by every model; their discriminability stays at the prior");
  }

  double obj = objective_and_gradient(current, matrix, config.prior, g);
  result.initial_objective = obj;
  result.objective = obj;
  result.params = current;

  for (int t = 1; t <= config.iterations; ++t) {
    if (!all_finite(g.ability) || !all_finite(g.difficulty) || !all_finite(g.log_discrimination)) {
      throw ValidationError("2PL fit produced a non-finite gradient at iteration " +
                            std::to_string(t - 1) + "; try a smaller learning rate");
    }
    adam.step(current.ability, g.ability, config.learning_rate, t, 0);
    adam.step(current.difficulty, g.difficulty, config.learning_rate, t, J);
    adam.step(current.log_discrimination, g.log_discrimination, config.learning_rate, t, J + I);

    obj = objective_and_gradient(current, matrix, config.prior, g);
    if (std::isfinite(obj) && obj > result.objective) {
      result.objective = obj;
      result.params = current;
      result.best_iteration = t;
    }
  }
  return result;
}

std::vector<double> discriminability_column(const IrtParams& params) {
  std::vector<double> out(params.log_discrimination.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = params.discrimination(i);
  return out;
}

}  // namespace dataprism::irt
