#include "dataprism/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dataprism/error.hpp"
#include "dataprism/sampling.hpp"
#include "dataprism/stats.hpp"

namespace dataprism::similarity {

double smd(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw ValidationError("SMD needs at least 2 values per side");
  const double diff = stats::mean(a) - stats::mean(b);
  const double sa = stats::sample_sd(a);
  const double sb = stats::sample_sd(b);
  const double pooled = std::sqrt((sa * sa + sb * sb) / 2.0);
  if (pooled == 0.0) {
    if (diff == 0.0) return 0.0;
    throw ValidationError("SMD undefined: both samples are constant with different means");
  }
  return diff / pooled;
}

SimilarityVector from_components(const std::array<double, kNumDimensions>& components) {
  SimilarityVector v;
  v.smd = components;
  double sum = 0.0;
  for (double c : components) sum += std::abs(c);
  v.avg_abs = sum / static_cast<double>(kNumDimensions);
  return v;
}

SimilarityVector similarity_vector(const FeatureTable& a, const FeatureTable& b) {
  std::array<double, kNumDimensions> comps{};
  for (Dimension d : kAllDimensions) {
    const auto& ra = a.column(d).raw;
    const auto& rb = b.column(d).raw;
    if (ra.size() != a.size() || rb.size() != b.size()) {
      throw ValidationError("dimension " + std::string(to_string(d)) + " missing from a feature table");
    }
    try {
      comps[static_cast<std::size_t>(d)] = smd(ra, rb);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(to_string(d)) + ": " + e.what());
    }
  }
  return from_components(comps);
}

FeatureTable subset(const FeatureTable& table, std::span<const std::size_t> rows) {
  FeatureTable out;
  out.ids.reserve(rows.size());
  for (std::size_t r : rows) out.ids.push_back(table.ids.at(r));
  for (Dimension d : kAllDimensions) {
    const auto& src = table.column(d);
    auto& dst = out.column(d);
    dst.scaler = src.scaler;
    dst.provenance = src.provenance;
    for (std::size_t r : rows) {
      dst.raw.push_back(src.raw.at(r));
      dst.scaled.push_back(src.scaled.at(r));
    }
  }
  return out;
}

double subsample_consistency(const FeatureTable& table, double fraction, int trials,
                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0,1]");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  const auto size = static_cast<std::size_t>(std::floor(static_cast<double>(table.size()) * fraction + 1e-9));
  if (size < 2) throw ValidationError("subsample of fewer than 2 rows");
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(sampling::child_seed(seed, static_cast<std::uint64_t>(t)));
    auto rows = sampling::sample_without_replacement(table.size(), size, rng);
    std::sort(rows.begin(), rows.end());
    total += similarity_vector(table, subset(table, rows)).avg_abs;
  }
  return total / static_cast<double>(trials);
}

}  // namespace dataprism::similarity
