#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "dataprism/error.hpp"
#include "dataprism/sampling.hpp"
#include "test_util.hpp"

using namespace dataprism;
using namespace dataprism::sampling;

namespace {

// Table with the given raw values in every dimension.
FeatureTable single(const std::vector<double>& raw) {
  return testutil::make_table(std::vector<std::vector<double>>(kNumDimensions, raw));
}

std::vector<std::size_t> sizes(const std::vector<Split>& splits) {
  std::vector<std::size_t> out;
  for (const auto& s : splits) out.push_back(s.instance_ids.size());
  return out;
}

void check_partition(const FeatureTable& t, Dimension d, const std::vector<Split>& splits) {
  std::unordered_map<std::string, double> raw;
  for (std::size_t r = 0; r < t.size(); ++r) raw[t.ids[r]] = t.column(d).raw[r];
  std::set<std::string> seen;
  double prev_max = -1e300;
  for (std::size_t k = 0; k < splits.size(); ++k) {
    const auto& s = splits[k];
    CHECK(s.dimension == d);
    CHECK(s.bin_index == static_cast<int>(k));
    CHECK(s.label == std::string(to_string(d)) + "_" + std::to_string(k));
    REQUIRE_FALSE(s.instance_ids.empty());
    double lo = 1e300, hi = -1e300;
    for (const auto& id : s.instance_ids) {
      CHECK(seen.insert(id).second);
      lo = std::min(lo, raw.at(id));
      hi = std::max(hi, raw.at(id));
    }
    CHECK(lo >= prev_max);
    prev_max = hi;
  }
  CHECK(seen.size() == t.size());
}

}  // namespace

TEST_CASE("stratified_deciles on distinct values") {
  std::vector<double> raw(100);
  std::iota(raw.begin(), raw.end(), 0.0);
  std::reverse(raw.begin(), raw.end());
  const auto t = single(raw);
  const auto s = stratified_deciles(t, Dimension::difficulty, 10);
  REQUIRE(s.size() == 10);
  check_partition(t, Dimension::difficulty, s);
  // Row r holds value 99 - r.
  std::vector<std::string> bin0, bin9;
  for (int v = 0; v < 10; ++v) bin0.push_back(testutil::id_of(static_cast<std::size_t>(99 - v)));
  for (int v = 90; v < 100; ++v) bin9.push_back(testutil::id_of(static_cast<std::size_t>(99 - v)));
  CHECK(s[0].instance_ids == bin0);
  CHECK(s[9].instance_ids == bin9);
}

TEST_CASE("stratified_deciles remainder goes to the first bins") {
  std::vector<double> raw(23);
  std::iota(raw.begin(), raw.end(), 0.0);
  const auto s = stratified_deciles(single(raw), Dimension::length, 10);
  CHECK(sizes(s) == std::vector<std::size_t>{3, 3, 3, 2, 2, 2, 2, 2, 2, 2});
}

TEST_CASE("stratified_deciles with all values equal orders by id") {
  const auto t = single(std::vector<double>(20, 1.0));
  const auto s = stratified_deciles(t, Dimension::noise, 10);
  std::vector<std::string> flat;
  for (const auto& sp : s) flat.insert(flat.end(), sp.instance_ids.begin(), sp.instance_ids.end());
  CHECK(flat == t.ids);
  CHECK_THROWS_AS(stratified_deciles(single({1, 2, 3}), Dimension::noise, 10), ValidationError);
  CHECK_THROWS_AS(stratified_deciles(single({1, 2, 3}), Dimension::noise, 0), ValidationError);
}

TEST_CASE("degenerate minimum rule") {
  std::vector<double> raw(100, 0.0);
  for (std::size_t k = 50; k < 100; ++k) raw[k] = static_cast<double>(k);
  const auto t = single(raw);
  CHECK(degenerate_minimum(t, Dimension::noise, 10));
  const auto s = stratified_deciles_degenerate(t, Dimension::noise, 10);
  CHECK(sizes(s) == std::vector<std::size_t>{50, 6, 6, 6, 6, 6, 5, 5, 5, 5});
  check_partition(t, Dimension::noise, s);

  std::vector<double> few(100);
  std::iota(few.begin(), few.end(), 0.0);
  std::fill(few.begin(), few.begin() + 15, 0.0);
  const auto t2 = single(few);
  CHECK_FALSE(degenerate_minimum(t2, Dimension::noise, 10));
  CHECK(stratified_deciles_degenerate(t2, Dimension::noise, 10) == stratified_deciles(t2, Dimension::noise, 10));

  // Exactly at the threshold of 20 the rule fires.
  std::fill(few.begin(), few.begin() + 20, 0.0);
  CHECK(degenerate_minimum(single(few), Dimension::noise, 10));

  CHECK_THROWS_AS(stratified_deciles_degenerate(single(std::vector<double>(100, 0.0)), Dimension::noise, 10),
                  ValidationError);
}

TEST_CASE("decile invariants on random tables") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 10 + seed * 37;
    auto t = testutil::random_table(n, seed);
    // Add ties by rounding one column.
    for (double& v : t.column(Dimension::length).raw) v = std::round(v * 2);
    for (Dimension d : kAllDimensions) {
      check_partition(t, d, stratified_deciles_degenerate(t, d, 10));
    }
  }
}

TEST_CASE("random_samples sizes, determinism and independence") {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < 100; ++i) ids.push_back(testutil::id_of(i));
  const auto a = random_samples(ids, 0.1, 200, 42);
  REQUIRE(a.size() == 200);
  CHECK(a[0].label == "random_000");
  CHECK(a[17].label == "random_017");
  for (const auto& s : a) {
    CHECK(s.instance_ids.size() == 10);
    CHECK(std::set<std::string>(s.instance_ids.begin(), s.instance_ids.end()).size() == 10);
    CHECK_FALSE(s.dimension.has_value());
  }
  CHECK(random_samples(ids, 0.1, 200, 42) == a);
  CHECK(random_samples(ids, 0.1, 200, 43) != a);
  // Trial t depends only on (seed, t).
  const auto shorter = random_samples(ids, 0.1, 5, 42);
  for (std::size_t t = 0; t < 5; ++t) CHECK(shorter[t] == a[t]);

  CHECK(random_samples(ids, 0.29, 1, 1)[0].instance_ids.size() == 29);
  CHECK_THROWS_AS(random_samples(ids, 0.001, 1, 1), ValidationError);
  CHECK_THROWS_AS(random_samples(ids, 0.0, 1, 1), ValidationError);
  CHECK_THROWS_AS(random_samples(ids, 0.5, 0, 1), ValidationError);

  std::vector<std::string> big;
  for (std::size_t i = 0; i < 10570; ++i) big.push_back(testutil::id_of(i));
  CHECK(random_samples(big, 0.1, 2, 0)[1].instance_ids.size() == 1057);
}

TEST_CASE("uniform_index is roughly uniform") {
  std::mt19937_64 rng(0);
  std::vector<int> counts(7, 0);
  for (int k = 0; k < 70000; ++k) ++counts[uniform_index(rng, 7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  CHECK_THROWS_AS(uniform_index(rng, 0), ValidationError);
}

TEST_CASE("child seeds differ across indices and parents") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(child_seed(s, i));
  }
  CHECK(seen.size() == 1000);
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
}

TEST_CASE("splits file round trip") {
  testutil::TempDir dir;
  std::vector<double> raw(30);
  std::iota(raw.begin(), raw.end(), 0.0);
  auto splits = stratified_deciles(single(raw), Dimension::ambiguity, 3);
  const auto rnd = random_samples(single(raw).ids, 0.2, 2, 5);
  splits.insert(splits.end(), rnd.begin(), rnd.end());
  write_splits(splits, dir / "splits.jsonl", 5);
  const auto text = testutil::read_text(dir / "splits.jsonl");
  CHECK(text.rfind("{\"version\":\"1\",\"seed\":5}\n", 0) == 0);
  CHECK(read_splits(dir / "splits.jsonl") == splits);
}
