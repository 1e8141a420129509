#include "dataprism/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "dataprism/error.hpp"

namespace dataprism::sampling {
namespace {

// Row positions ordered by (raw value, id).
std::vector<std::size_t> sorted_rows(const FeatureTable& table, Dimension dim) {
  const auto& raw = table.column(dim).raw;
  if (raw.size() != table.size()) {
    throw ValidationError("dimension " + std::string(to_string(dim)) + " not present in feature table");
  }
  std::vector<std::size_t> rows(table.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
    if (raw[a] != raw[b]) return raw[a] < raw[b];
    return table.ids[a] < table.ids[b];
  });
  return rows;
}

Split make_split(const FeatureTable& table, Dimension dim, int bin,
                 std::span<const std::size_t> rows) {
  Split s;
  s.label = std::string(to_string(dim)) + "_" + std::to_string(bin);
  s.dimension = dim;
  s.bin_index = bin;
  s.instance_ids.reserve(rows.size());
  for (std::size_t r : rows) s.instance_ids.push_back(table.ids[r]);
  return s;
}

// Appends `chunks` contiguous chunks of `rows`, the first rows.size() % chunks
// of them one longer.
void chunk_into(const FeatureTable& table, Dimension dim, std::span<const std::size_t> rows,
                int chunks, int first_bin, std::vector<Split>& out) {
  const std::size_t n = rows.size();
  const std::size_t base = n / static_cast<std::size_t>(chunks);
  const std::size_t extra = n % static_cast<std::size_t>(chunks);
  std::size_t pos = 0;
  for (int k = 0; k < chunks; ++k) {
    const std::size_t len = base + (static_cast<std::size_t>(k) < extra ? 1 : 0);
    out.push_back(make_split(table, dim, first_bin + k, rows.subspan(pos, len)));
    pos += len;
  }
}

void require_bins(int bins) {
  if (bins < 1) throw ValidationError("bins must be positive");
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw ValidationError("uniform_index needs a positive bound");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k,
                                                    std::mt19937_64& rng) {
  if (k > n) throw ValidationError("cannot draw " + std::to_string(k) + " of " + std::to_string(n));
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

std::vector<Split> stratified_deciles(const FeatureTable& table, Dimension dim, int bins) {
  require_bins(bins);
  if (table.size() < static_cast<std::size_t>(bins)) {
    throw ValidationError("stratifying " + std::to_string(table.size()) + " instances into " +
                          std::to_string(bins) + " bins");
  }
  const auto rows = sorted_rows(table, dim);
  std::vector<Split> out;
  chunk_into(table, dim, rows, bins, 0, out);
  return out;
}

bool degenerate_minimum(const FeatureTable& table, Dimension dim, int bins) {
  require_bins(bins);
  const auto& raw = table.column(dim).raw;
  if (raw.empty()) return false;
  const double lo = *std::min_element(raw.begin(), raw.end());
  const auto at_min = static_cast<double>(std::count(raw.begin(), raw.end(), lo));
  return at_min >= 2.0 * static_cast<double>(raw.size()) / static_cast<double>(bins);
}

std::vector<Split> stratified_deciles_degenerate(const FeatureTable& table, Dimension dim, int bins) {
  if (!degenerate_minimum(table, dim, bins)) return stratified_deciles(table, dim, bins);
  const auto rows = sorted_rows(table, dim);
  const auto& raw = table.column(dim).raw;
  const double lo = raw[rows.front()];
  const auto at_min = static_cast<std::size_t>(std::count(raw.begin(), raw.end(), lo));
  const std::size_t rest = rows.size() - at_min;
  if (rest < static_cast<std::size_t>(bins - 1)) {
    throw ValidationError(std::to_string(at_min) + " of " + std::to_string(rows.size()) +
                          " instances share the minimum " + std::string(to_string(dim)) +
                          "; the remaining bins would be empty");
  }
  std::vector<Split> out;
  const std::span<const std::size_t> all(rows);
  out.push_back(make_split(table, dim, 0, all.first(at_min)));
  chunk_into(table, dim, all.subspan(at_min), bins - 1, 1, out);
  return out;
}

std::vector<Split> random_samples(std::span<const std::string> ids, double fraction, int trials,
                                  std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("fraction must lie in (0,1]");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  // The epsilon keeps products like 100 * 0.29 from flooring one short.
  const auto size = static_cast<std::size_t>(std::floor(static_cast<double>(ids.size()) * fraction + 1e-9));
  if (size == 0) {
    throw ValidationError("random samples of " + std::to_string(ids.size()) + " instances at fraction " +
                          std::to_string(fraction) + " would be empty");
  }
  std::vector<Split> out;
  out.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 rng(child_seed(seed, static_cast<std::uint64_t>(t)));
    char label[32];
    std::snprintf(label, sizeof(label), "random_%03d", t);
    Split s;
    s.label = label;
    for (std::size_t row : sample_without_replacement(ids.size(), size, rng)) {
      s.instance_ids.push_back(ids[row]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Split> random_samples(const Dataset& dataset, double fraction, int trials,
                                  std::uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& inst : dataset.instances) ids.push_back(inst.id);
  return random_samples(ids, fraction, trials, seed);
}

void write_splits(std::span<const Split> splits, const std::filesystem::path& path,
                  std::optional<std::uint64_t> seed) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  nlohmann::ordered_json head{{"version", "1"}};
  if (seed) head["seed"] = *seed;
  out << head.dump() << '\n';
  for (const auto& s : splits) {
    nlohmann::ordered_json row{{"label", s.label}};
    if (s.dimension) row["dimension"] = to_string(*s.dimension);
    if (s.bin_index) row["bin_index"] = *s.bin_index;
    row["instance_ids"] = s.instance_ids;
    out << row.dump() << '\n';
  }
  if (!out) throw IoError("write error on " + path.string());
}

std::vector<Split> read_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<Split> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto obj = nlohmann::json::parse(line);
      if (obj.is_object() && obj.contains("version") && !obj.contains("label")) continue;
      Split s;
      s.label = obj.at("label").get<std::string>();
      if (obj.contains("dimension")) {
        const auto name = obj.at("dimension").get<std::string>();
        s.dimension = parse_dimension(name);
        if (!s.dimension) throw ValidationError("unknown dimension \"" + name + "\"");
      }
      if (obj.contains("bin_index")) s.bin_index = obj.at("bin_index").get<int>();
      s.instance_ids = obj.at("instance_ids").get<std::vector<std::string>>();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace dataprism::sampling
