#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "dataprism/error.hpp"
#include "dataprism/oodpredict.hpp"
#include "test_util.hpp"

using namespace dataprism;
using namespace dataprism::ood;

namespace {

OodInstance row(InputVector x, double y, std::string a = "A", std::string b = "B") {
  OodInstance o;
  o.x = x;
  o.y = y;
  o.pair = {std::move(a), std::move(b)};
  o.model_id = "m";
  return o;
}

std::vector<OodInstance> random_rows(std::size_t n, std::uint64_t seed, double noise) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0, 1);
  std::vector<OodInstance> out;
  for (std::size_t k = 0; k < n; ++k) {
    InputVector x;
    x[0] = 70 + 10 * z(rng);
    for (std::size_t d = 1; d < kNumInputs; ++d) x[d] = z(rng);
    const double y = 3 + 0.9 * x[0] - 4 * x[2] + 1.5 * x[5] + noise * z(rng);
    out.push_back(row(x, y));
  }
  return out;
}

}  // namespace

TEST_CASE("build_ood_instances") {
  ScoreTable scores{{{"m1", "full"}, 85.0}, {{"m1", "topic"}, 80.0}};
  std::vector<PairSimilarity> pairs{{{"full", "topic"}, similarity::from_components({0.1, 0.2, 0, 0, 0, 0})}};
  const auto inst = build_ood_instances(scores, pairs);
  REQUIRE(inst.size() == 1);
  CHECK(inst[0].x == InputVector{85.0, 0.1, 0.2, 0, 0, 0, 0});
  CHECK(inst[0].y == 80.0);
  CHECK(inst[0].model_id == "m1");

  // 10 models and all ordered pairs over 5 topics.
  ScoreTable many;
  std::vector<PairSimilarity> all_pairs;
  for (int m = 0; m < 10; ++m) {
    for (int d = 0; d < 5; ++d) many[{"m" + std::to_string(m), "t" + std::to_string(d)}] = 50.0 + m + d;
  }
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      if (a != b) all_pairs.push_back({{"t" + std::to_string(a), "t" + std::to_string(b)}, {}});
    }
  }
  CHECK(all_pairs.size() == 20);
  CHECK(build_ood_instances(many, all_pairs).size() == 200);
  CHECK(build_ood_instances(many, std::span(all_pairs).first(5)).size() == 50);

  scores.erase({"m1", "topic"});
  CHECK_THROWS_AS(build_ood_instances(scores, pairs), ValidationError);
}

TEST_CASE("split_by_pairs partitions by pair") {
  std::vector<OodInstance> inst;
  for (int p = 0; p < 34; ++p) {
    for (int m = 0; m < 3; ++m) inst.push_back(row({}, 0, "full", "t" + std::to_string(p)));
  }
  const auto folds = split_by_pairs(inst, 5, 5, 77);
  REQUIRE(folds.size() == 5);
  std::set<std::vector<DatasetPair>> distinct;
  for (const auto& f : folds) {
    CHECK(f.held_out_pairs.size() == 5);
    CHECK(f.test.size() == 15);
    CHECK(f.train.size() == inst.size() - 15);
    std::set<DatasetPair> held(f.held_out_pairs.begin(), f.held_out_pairs.end());
    CHECK(held.size() == 5);
    for (const auto& o : f.test) CHECK(held.contains(o.pair));
    for (const auto& o : f.train) CHECK_FALSE(held.contains(o.pair));
    distinct.insert(f.held_out_pairs);
  }
  CHECK(distinct.size() > 1);
  CHECK(split_by_pairs(inst, 5, 5, 77)[3].held_out_pairs == folds[3].held_out_pairs);
  CHECK(split_by_pairs(inst, 1, 1, 1)[0].held_out_pairs.size() == 1);
  CHECK_THROWS_AS(split_by_pairs(inst, 34, 1, 1), ValidationError);
  CHECK_THROWS_AS(split_by_pairs(inst, 0, 1, 1), ValidationError);
}

TEST_CASE("fit_ols recovers an exact linear relation") {
  std::vector<OodInstance> train;
  for (int k = 0; k < 20; ++k) train.push_back(row({static_cast<double>(k), 0, 0, 0, 0, 0, 0}, 2.0 * k + 1.0));
  const auto m = fit_ols(train);
  CHECK(m.weights[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.bias == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < kNumInputs; ++k) CHECK(m.weights[k] == 0.0);
  CHECK(predict(m, InputVector{10, 0, 0, 0, 0, 0, 0}) == doctest::Approx(21.0).epsilon(1e-6));
}

TEST_CASE("fit_ols with a constant target") {
  const auto train = random_rows(30, 1, 0.0);
  std::vector<OodInstance> flat = train;
  for (auto& o : flat) o.y = 64.0;
  const auto m = fit_ols(flat);
  for (double w : m.weights) CHECK(std::abs(w) < 1e-9);
  CHECK(m.bias == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("fit_ols is unchanged by duplicated rows") {
  const auto train = random_rows(40, 2, 1.0);
  auto doubled = train;
  doubled.insert(doubled.end(), train.begin(), train.end());
  const auto a = fit_ols(train);
  const auto b = fit_ols(doubled);
  for (std::size_t k = 0; k < kNumInputs; ++k) CHECK(a.weights[k] == doctest::Approx(b.weights[k]).epsilon(1e-7));
  CHECK(a.bias == doctest::Approx(b.bias).epsilon(1e-7));
}

TEST_CASE("fit_ols residuals are orthogonal to the inputs") {
  const auto train = random_rows(200, 3, 2.0);
  const auto m = fit_ols(train);
  for (std::size_t k = 0; k < kNumInputs; ++k) {
    double dot = 0, sum = 0;
    for (const auto& o : train) {
      const double r = o.y - predict(m, o.x);
      dot += r * o.x[k];
      sum += r;
    }
    CHECK(std::abs(dot) < 1e-6 * train.size() * 100);
    CHECK(std::abs(sum) < 1e-6);
  }
}

TEST_CASE("fit_ols handles constant columns and diagnoses collinear ones") {
  auto train = random_rows(40, 7, 1.0);
  for (auto& o : train) o.x[4] = 0.25;
  const auto m = fit_ols(train);
  CHECK(m.weights[4] == 0.0);
  CHECK(m.input_sd[4] == 0.0);

  // An exact copy of another column is rescued by the ridge and fatal without it.
  for (auto& o : train) o.x[3] = o.x[1];
  CHECK_NOTHROW(fit_ols(train));
  try {
    fit_ols(train, 0.0);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("smd_discriminability") != std::string::npos);
  }
  CHECK_THROWS_AS(fit_ols(std::span(train).first(7)), ValidationError);
}

TEST_CASE("predict, baseline and affinity") {
  OodModel m;
  m.bias = 80;
  CHECK(predict(m, InputVector{1, 2, 3, 4, 5, 6, 7}) == 80.0);
  CHECK(baseline_identity(InputVector{85.0, 1, 1, 1, 1, 1, 1}) == 85.0);
  CHECK_THROWS_AS(predict(m, std::vector<double>{1, 2}), ValidationError);
  CHECK_THROWS_AS(baseline_identity(std::vector<double>{1}), ValidationError);

  const auto fit = fit_ols(random_rows(30, 4, 1.0));
  const InputVector x{70, 1, 2, 3, 4, 5, 6}, x2{60, -1, 0, 1, 0, 2, 1};
  double wdx = 0;
  for (std::size_t k = 0; k < kNumInputs; ++k) wdx += fit.weights[k] * (x[k] - x2[k]);
  CHECK(predict(fit, x) - predict(fit, x2) == doctest::Approx(wdx).epsilon(1e-9));
}

TEST_CASE("evaluate") {
  auto e = evaluate(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
  CHECK(e.mad == 0.0);
  CHECK(*e.r2 == 1.0);
  e = evaluate(std::vector<double>{1, 3}, std::vector<double>{2, 2});
  CHECK(e.mad == 1.0);
  CHECK_FALSE(e.r2.has_value());
  e = evaluate(std::vector<double>{0, 0, 0}, std::vector<double>{1, 2, 3});
  CHECK(e.mad == 2.0);
  CHECK(*e.r2 == doctest::Approx(1.0 - 14.0 / 2.0));
  CHECK_THROWS_AS(evaluate(std::vector<double>{1}, std::vector<double>{1, 2}), ValidationError);
  CHECK_THROWS_AS(evaluate(std::vector<double>{}, std::vector<double>{}), ValidationError);
}

TEST_CASE("feature_importance") {
  OodModel m;
  m.weights = {9, 2, -4, 1, 0, 0.5, 1};
  m.input_sd = {3, 1, 1, 1, 1, 1, 1};
  const auto imp = feature_importance(m);
  const std::array<double, kNumDimensions> expected{0.5, 1.0, 0.25, 0.0, 0.125, 0.25};
  for (std::size_t k = 0; k < kNumDimensions; ++k) CHECK(imp[k] == doctest::Approx(expected[k]).epsilon(1e-15));

  m.weights = {1, 0, 0, 0, 3, 0, 0};
  CHECK(feature_importance(m) == std::array<double, kNumDimensions>{0, 0, 0, 1, 0, 0});

  // Standardization: a small weight on a wide column can dominate.
  m.weights = {0, 1, 10, 0, 0, 0, 0};
  m.input_sd = {1, 100, 1, 1, 1, 1, 1};
  CHECK(feature_importance(m)[0] == 1.0);
  CHECK(feature_importance(m)[1] == doctest::Approx(0.1));

  testutil::WarningCapture w;
  m.weights = {5, 0, 0, 0, 0, 0, 0};
  CHECK(feature_importance(m) == std::array<double, kNumDimensions>{});
  CHECK(w.messages.size() == 1);
}

TEST_CASE("importance equals normalized weights of a standardized refit") {
  const auto train = random_rows(120, 5, 1.0);
  const auto m = fit_ols(train);
  // Refit on inputs divided by their population sd.
  std::vector<OodInstance> std_train = train;
  for (auto& o : std_train) {
    for (std::size_t k = 0; k < kNumInputs; ++k) o.x[k] = (o.x[k] - m.input_mean[k]) / m.input_sd[k];
  }
  const auto s = fit_ols(std_train);
  double mx = 0;
  for (std::size_t k = 1; k < kNumInputs; ++k) mx = std::max(mx, std::abs(s.weights[k]));
  const auto imp = feature_importance(m);
  for (std::size_t k = 0; k < kNumDimensions; ++k) {
    CHECK(imp[k] == doctest::Approx(std::abs(s.weights[k + 1]) / mx).epsilon(1e-6));
  }
}

TEST_CASE("run_folds aggregates") {
  std::vector<OodInstance> inst;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0, 1);
  for (int p = 0; p < 14; ++p) {
    InputVector sim{};
    for (std::size_t k = 1; k < kNumInputs; ++k) sim[k] = 0.3 * z(rng);
    for (int m = 0; m < 10; ++m) {
      InputVector x = sim;
      x[0] = 60 + 3 * m;
      inst.push_back(row(x, x[0] - 8 * x[2] + 0.1 * z(rng), "src", "t" + std::to_string(p)));
    }
  }
  const auto folds = split_by_pairs(inst, 1, 4, 3);
  const auto rep = run_folds(folds);
  REQUIRE(rep.folds.size() == 4);
  double mad = 0;
  for (const auto& f : rep.folds) mad += f.model.mad;
  CHECK(rep.mean_mad == doctest::Approx(mad / 4));
  CHECK(rep.mean_mad < rep.mean_baseline_mad);
  CHECK(rep.importance[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(run_folds(std::vector<Fold>{}), ValidationError);
}
