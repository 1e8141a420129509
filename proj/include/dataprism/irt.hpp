#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dataprism::irt {

/// Binary model x item response matrix (1 = correct), row-major.
struct ResponseMatrix {
  std::vector<std::string> model_ids;
  std::vector<std::string> instance_ids;
  std::vector<std::uint8_t> responses;

  std::size_t num_models() const { return model_ids.size(); }
  std::size_t num_items() const { return instance_ids.size(); }
  std::uint8_t at(std::size_t model, std::size_t item) const {
    return responses[model * instance_ids.size() + item];
  }

  /// Shape and {0,1} checks.
  void validate() const;

  /// Items answered identically by every model. Their discriminability has
  /// no likelihood signal and is driven by the prior alone.
  std::vector<std::size_t> constant_items() const;
};

/// 2PL parameters. Discriminability is exp(log_discrimination).
struct IrtParams {
  std::vector<double> ability;             // per model
  std::vector<double> difficulty;          // per item
  std::vector<double> log_discrimination;  // per item

  double discrimination(std::size_t item) const;
};

struct PriorConfig {
  double ability_var = 1.0;
  double difficulty_var = 1.0;
  double log_discrimination_var = 0.25;
};

struct FitConfig {
  int iterations = 1000;
  double learning_rate = 0.05;
  std::uint64_t seed = 0;
  PriorConfig prior;
};

struct FitResult {
  IrtParams params;
  double objective = 0.0;          // objective of the returned iterate
  double initial_objective = 0.0;  // objective at the all-zero start
  int best_iteration = 0;          // 0 = the starting point
  std::vector<std::size_t> unidentifiable_items;
};

double sigmoid(double x);

/// P(correct) = sigmoid(a_i * (theta_j - b_i)).
double predict_prob(const IrtParams& params, std::size_t model, std::size_t item);

/// Bernoulli log-likelihood plus the full Gaussian log-prior densities on
/// ability, difficulty and log-discrimination.
double penalized_loglik(const IrtParams& params, const ResponseMatrix& matrix,
                        const PriorConfig& prior = {});

/// Full-batch gradient ascent from the all-zero start with Adam step scaling.
/// Returns the best iterate seen, so objective >= initial_objective.
/// Requires at least 2 models and 2 items.
FitResult fit_2pl(const ResponseMatrix& matrix, const FitConfig& config = {});

/// Per-item discriminability a_i = exp(alpha_i).
std::vector<double> discriminability_column(const IrtParams& params);

}  // namespace dataprism::irt
