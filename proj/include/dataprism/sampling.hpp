#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dataprism/types.hpp"

namespace dataprism::sampling {

struct Split {
  std::string label;
  std::vector<std::string> instance_ids;
  std::optional<Dimension> dimension;
  std::optional<int> bin_index;

  bool operator==(const Split&) const = default;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed for stream `index` under `seed`: splitmix64(seed ^ splitmix64(index + 1)).
/// Streams are independent of each other and of generation order.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

/// Uniform integer in [0, bound) by rejection, so results do not depend on
/// the standard library's distribution implementation.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound);

/// `k` distinct indices from [0, n), in draw order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng);

/// Sort by (raw value, id), then cut into `bins` contiguous chunks; the first
/// n % bins chunks get one extra instance. Requires n >= bins.
std::vector<Split> stratified_deciles(const FeatureTable& table, Dimension dim, int bins = 10);

/// True when the minimum raw value is shared by at least 2 * n / bins
/// instances.
bool degenerate_minimum(const FeatureTable& table, Dimension dim, int bins = 10);

/// Bin 0 takes every minimum-value instance, the rest are split into bins - 1
/// chunks by the standard rule. Falls back to stratified_deciles when the
/// trigger is not met. Throws ValidationError if any bin would be empty.
std::vector<Split> stratified_deciles_degenerate(const FeatureTable& table, Dimension dim,
                                                 int bins = 10);

/// Uniform samples without replacement of floor(n * fraction) ids each; trial
/// t draws from child_seed(seed, t). Labels are "random_000", "random_001"...
std::vector<Split> random_samples(std::span<const std::string> ids, double fraction, int trials,
                                  std::uint64_t seed);
std::vector<Split> random_samples(const Dataset& dataset, double fraction, int trials,
                                  std::uint64_t seed);

/// One JSON object per split: {"label","dimension"?,"bin_index"?,"instance_ids"}.
// The first line is a {"version","seed"} header; read_splits skips it.
void write_splits(std::span<const Split> splits, const std::filesystem::path& path,
                  std::optional<std::uint64_t> seed = std::nullopt);
std::vector<Split> read_splits(const std::filesystem::path& path);

}  // namespace dataprism::sampling
