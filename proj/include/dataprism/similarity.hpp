#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "dataprism/types.hpp"

namespace dataprism::similarity {

/// (mean_a - mean_b) / sqrt((s_a^2 + s_b^2) / 2) with sample deviations.
/// Both sides need >= 2 values. A zero pooled deviation yields 0 when the
/// means are equal and a ValidationError otherwise.
double smd(std::span<const double> a, std::span<const double> b);

struct SimilarityVector {
  std::array<double, kNumDimensions> smd{};
  double avg_abs = 0.0;

  double component(Dimension d) const { return smd[static_cast<std::size_t>(d)]; }
};

SimilarityVector from_components(const std::array<double, kNumDimensions>& components);

/// Component k compares the raw values of dimension k.
SimilarityVector similarity_vector(const FeatureTable& a, const FeatureTable& b);

/// Mean over trials of avg_abs between the full table and a uniform random
/// subsample of floor(n * fraction) rows. fraction in (0, 1].
double subsample_consistency(const FeatureTable& table, double fraction, int trials,
                             std::uint64_t seed);

/// Rows of `table` at the given positions, scaled values carried over.
FeatureTable subset(const FeatureTable& table, std::span<const std::size_t> rows);

}  // namespace dataprism::similarity
