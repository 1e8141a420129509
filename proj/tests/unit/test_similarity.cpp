#include <doctest.h>

#include <cmath>
#include <random>

#include "dataprism/error.hpp"
#include "dataprism/similarity.hpp"
#include "test_util.hpp"

using namespace dataprism;
using namespace dataprism::similarity;

namespace {

double smd_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto stats = [](const std::vector<double>& v) {
    long double m = 0;
    for (double x : v) m += x;
    m /= v.size();
    long double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair<long double, long double>{m, ss / (v.size() - 1)};
  };
  const auto [ma, va] = stats(a);
  const auto [mb, vb] = stats(b);
  return static_cast<double>((ma - mb) / std::sqrt((va + vb) / 2));
}

}  // namespace

TEST_CASE("smd examples") {
  CHECK(smd(std::vector<double>{1, 2, 3}, std::vector<double>{3, 1, 2}) == 0.0);
  const std::vector<double> a{0.5, 0.7}, b{0.3, 0.5};
  CHECK(smd(a, b) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(smd(a, b) == doctest::Approx(1.4142).epsilon(1e-4));
  CHECK(smd(b, a) == doctest::Approx(-1.4142).epsilon(1e-4));
  CHECK(smd(std::vector<double>{2, 2}, std::vector<double>{2, 2, 2}) == 0.0);
  CHECK_THROWS_AS(smd(std::vector<double>{1, 1}, std::vector<double>{2, 2}), ValidationError);
  CHECK_THROWS_AS(smd(std::vector<double>{1}, std::vector<double>{2, 3}), ValidationError);
}

TEST_CASE("smd matches the oracle and its invariances") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0, 1);
  std::uniform_int_distribution<int> len(2, 40);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> a(static_cast<std::size_t>(len(rng))), b(static_cast<std::size_t>(len(rng)));
    for (double& x : a) x = n(rng);
    for (double& x : b) x = 0.3 + 1.5 * n(rng);
    const double s = smd(a, b);
    CHECK(s == doctest::Approx(smd_oracle(a, b)).epsilon(1e-9));
    CHECK(smd(b, a) == -s);
  }
}

TEST_CASE("from_components average") {
  const auto v = from_components({1, -1, 0, 0, 0, 0});
  CHECK(v.avg_abs == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(from_components({}).avg_abs == 0.0);
}

TEST_CASE("similarity_vector") {
  const auto t = testutil::random_table(60, 1);
  const auto self = similarity_vector(t, t);
  for (double c : self.smd) CHECK(c == 0.0);
  CHECK(self.avg_abs == 0.0);

  const auto u = testutil::random_table(80, 2);
  const auto v = similarity_vector(t, u);
  for (Dimension d : kAllDimensions) {
    CHECK(v.component(d) == doctest::Approx(smd_oracle(t.column(d).raw, u.column(d).raw)).epsilon(1e-9));
  }
  CHECK(v.avg_abs > 0.0);

  FeatureTable broken = u;
  broken.column(Dimension::noise).raw.clear();
  try {
    similarity_vector(t, broken);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("noise") != std::string::npos);
  }
}

TEST_CASE("subsample consistency") {
  const auto t = testutil::random_table(400, 4);
  CHECK(subsample_consistency(t, 1.0, 5, 9) == 0.0);
  const double a = subsample_consistency(t, 0.1, 20, 9);
  CHECK(a == subsample_consistency(t, 0.1, 20, 9));
  CHECK(a != subsample_consistency(t, 0.1, 20, 10));
  // Larger subsamples sit closer to the full table, averaged over seeds.
  double small = 0, mid = 0, large = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    small += subsample_consistency(t, 0.05, 20, s);
    mid += subsample_consistency(t, 0.2, 20, s);
    large += subsample_consistency(t, 0.6, 20, s);
  }
  CHECK(small > mid);
  CHECK(mid > large);
  CHECK_THROWS_AS(subsample_consistency(t, 0.001, 5, 1), ValidationError);
  CHECK_THROWS_AS(subsample_consistency(t, 0.0, 5, 1), ValidationError);
}

TEST_CASE("subset keeps the selected rows") {
  const auto t = testutil::random_table(10, 5);
  const std::vector<std::size_t> rows{3, 1};
  const auto s = subset(t, rows);
  CHECK(s.ids == std::vector<std::string>{t.ids[3], t.ids[1]});
  CHECK(s.column(Dimension::noise).raw[0] == t.column(Dimension::noise).raw[3]);
  CHECK(s.column(Dimension::noise).scaled[1] == t.column(Dimension::noise).scaled[1]);
}
