#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dataprism/error.hpp"
#include "dataprism/ingest.hpp"
#include "test_util.hpp"

using namespace dataprism;
using namespace dataprism::ingest;
using testutil::read_text;
using testutil::TempDir;
using testutil::write_text;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("parse_instances reads the documented QA line") {
  TempDir dir;
  write_text(dir / "squad.jsonl",
             R"({"id":"q1","text_a":"ctx","text_b":"who?","gold":["Bob"],"annotator_labels":["Bob","Bob","Bobby"]})"
             "\n\n");
  const auto d = parse_instances(dir / "squad.jsonl", TaskKind::extractive_qa);
  CHECK(d.name == "squad");
  REQUIRE(d.size() == 1);
  const auto& in = d.instances[0];
  CHECK(in.id == "q1");
  CHECK(in.task_kind == TaskKind::extractive_qa);
  CHECK(in.text_a == "ctx");
  CHECK(in.text_b == "who?");
  CHECK(in.gold == std::vector<std::string>{"Bob"});
  CHECK(in.annotator_labels == std::vector<std::string>{"Bob", "Bob", "Bobby"});
}

TEST_CASE("parse_instances errors carry path and line") {
  TempDir dir;
  const auto p = dir / "d.jsonl";
  write_text(p, "{\"id\":\"q1\",\"text_a\":\"\",\"text_b\":\"\",\"gold\":[\"x\"]}\n"
                "{\"id\":\"q1\",\"text_a\":\"\",\"text_b\":\"\",\"gold\":[\"x\"]}\n");
  auto msg = error_of([&] { parse_instances(p, TaskKind::extractive_qa); });
  CHECK(msg.find("q1") != std::string::npos);
  CHECK(msg.find(p.string() + ":2") != std::string::npos);

  write_text(p, "{\"id\":\"q1\",\"text_a\":\"\",\"text_b\":\"\",\"gold\":[\"x\"]}\nnot json\n");
  msg = error_of([&] { parse_instances(p, TaskKind::extractive_qa); });
  CHECK(msg.find(p.string() + ":2") != std::string::npos);

  write_text(p, "{\"id\":\"q1\",\"text_a\":\"\",\"gold\":[\"x\"]}\n");
  msg = error_of([&] { parse_instances(p, TaskKind::extractive_qa); });
  CHECK(msg.find("text_b") != std::string::npos);
  CHECK(msg.find(p.string() + ":1") != std::string::npos);

  write_text(p, "{\"id\":\"q1\",\"text_a\":\"\",\"text_b\":\"\",\"gold\":[]}\n");
  CHECK_THROWS_AS(parse_instances(p, TaskKind::extractive_qa), ValidationError);
  write_text(p, "{\"id\":\"c1\",\"text_a\":\"\",\"text_b\":\"\",\"gold\":[\"e\",\"n\"]}\n");
  CHECK_THROWS_AS(parse_instances(p, TaskKind::classification), ValidationError);
  CHECK_THROWS_AS(parse_instances(dir / "absent.jsonl", TaskKind::classification), IoError);
}

TEST_CASE("parse_instances on an empty file warns") {
  TempDir dir;
  write_text(dir / "e.jsonl", "");
  testutil::WarningCapture w;
  const auto d = parse_instances(dir / "e.jsonl", TaskKind::classification);
  CHECK(d.empty());
  CHECK(w.messages.size() == 1);
}

TEST_CASE("parse_predictions") {
  TempDir dir;
  const auto p = dir / "bert.jsonl";
  write_text(p, R"({"id":"q1","prediction":"Bob"})"
                "\n"
                R"({"id":"m1","prediction":"entailment","probabilities":{"entailment":0.7,"neutral":0.2,"contradiction":0.1}})"
                "\n");
  auto ps = parse_predictions(p);
  CHECK(ps.model_id == "bert");
  CHECK(ps.predictions.at("q1") == "Bob");
  CHECK(ps.class_probabilities.at("m1").at("neutral") == 0.2);
  CHECK_FALSE(ps.class_probabilities.contains("q1"));

  write_text(p, R"({"model_id":"roberta-large"})"
                "\n"
                R"({"id":"q1","prediction":"Bob"})"
                "\n");
  CHECK(parse_predictions(p).model_id == "roberta-large");

  write_text(p, R"({"id":"q1","prediction":"e","probabilities":{"e":0.5,"n":0.4}})"
                "\n");
  CHECK_THROWS_AS(parse_predictions(p), ValidationError);
  write_text(p, R"({"id":"q1","prediction":"e"})"
                "\n"
                R"({"id":"q1","prediction":"n"})"
                "\n");
  CHECK(error_of([&] { parse_predictions(p); }).find(":2") != std::string::npos);
}

TEST_CASE("parse_predictions_dir sorts by file name") {
  TempDir dir;
  write_text(dir / "zeta.jsonl", R"({"id":"a","prediction":"x"})");
  write_text(dir / "alpha.jsonl", R"({"id":"a","prediction":"y"})");
  write_text(dir / "notes.txt", "ignored");
  const auto all = parse_predictions_dir(dir.path());
  REQUIRE(all.size() == 2);
  CHECK(all[0].model_id == "alpha");
  CHECK(all[1].model_id == "zeta");
}

TEST_CASE("trace, pvi and perplexity parsers") {
  TempDir dir;
  write_text(dir / "t.jsonl", R"({"id":"q1","gold_conf":[0.2,0.8]})");
  CHECK(parse_traces(dir / "t.jsonl") == std::vector<TraceRecord>{{"q1", {0.2, 0.8}}});
  write_text(dir / "t.jsonl", R"({"id":"q1","gold_conf":[0.2]})");
  CHECK_THROWS_AS(parse_traces(dir / "t.jsonl"), ValidationError);
  write_text(dir / "t.jsonl", R"({"id":"q1","gold_conf":[0.2,1.2]})");
  CHECK_THROWS_AS(parse_traces(dir / "t.jsonl"), ValidationError);

  write_text(dir / "p.jsonl", R"({"id":"q1","p_full":0.8,"p_null":0.5})");
  CHECK(parse_pvi(dir / "p.jsonl") == std::vector<PviRecord>{{"q1", 0.8, 0.5}});
  write_text(dir / "p.jsonl", R"({"id":"q1","p_full":0.0,"p_null":0.5})");
  CHECK_THROWS_AS(parse_pvi(dir / "p.jsonl"), ValidationError);

  write_text(dir / "l.jsonl", R"({"id":"q1","token_logprobs":[-0.693,-0.693]})");
  CHECK(parse_perplexity(dir / "l.jsonl") == std::vector<PerplexityRecord>{{"q1", {-0.693, -0.693}}});
  write_text(dir / "l.jsonl", R"({"id":"q1","token_logprobs":[]})");
  CHECK_THROWS_AS(parse_perplexity(dir / "l.jsonl"), ValidationError);
  write_text(dir / "l.jsonl", R"({"id":"q1","token_logprobs":[0.1]})");
  CHECK_THROWS_AS(parse_perplexity(dir / "l.jsonl"), ValidationError);
}

TEST_CASE("round trips for dataset, predictions and records") {
  TempDir dir;
  Dataset d;
  d.name = "rt";
  for (int k = 0; k < 5; ++k) {
    Instance in;
    in.id = "q" + std::to_string(k);
    in.task_kind = TaskKind::extractive_qa;
    in.text_a = "context \"quoted\" \xC3\xA9 " + std::to_string(k);
    in.text_b = "question?";
    in.gold = {"a", "b c"};
    in.annotator_labels = k % 2 ? std::vector<std::string>{"a", "a"} : std::vector<std::string>{};
    d.instances.push_back(in);
  }
  write_instances(d, dir / "rt.jsonl");
  CHECK(parse_instances(dir / "rt.jsonl", TaskKind::extractive_qa) == d);

  PredictionSet p;
  p.model_id = "rt_model";
  p.predictions = {{"q0", "a"}, {"q1", "b"}};
  p.class_probabilities["q1"] = {{"b", 0.25}, {"a", 0.75}};
  write_predictions(p, dir / "rt_model.jsonl");
  CHECK(parse_predictions(dir / "rt_model.jsonl") == p);

  const std::vector<TraceRecord> t{{"q0", {0.1, 0.30000000000000004}}};
  write_traces(t, dir / "t.jsonl");
  CHECK(parse_traces(dir / "t.jsonl") == t);
  const std::vector<PviRecord> v{{"q0", 0.1, 1.0 / 3.0}};
  write_pvi(v, dir / "v.jsonl");
  CHECK(parse_pvi(dir / "v.jsonl") == v);
  const std::vector<PerplexityRecord> l{{"q0", {-1e-300, -2.5}}};
  write_perplexity(l, dir / "l.jsonl");
  CHECK(parse_perplexity(dir / "l.jsonl") == l);
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double x = u(rng);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("feature table round trip is bit exact") {
  TempDir dir;
  auto t = testutil::random_table(120, 99);
  t.column(Dimension::perplexity).provenance = Provenance::ingested;
  write_feature_table(t, dir / "features.jsonl", 17);
  CHECK(std::filesystem::exists(dir / "features.scaler.json"));
  CHECK(read_text(dir / "features.scaler.json").find("\"seed\": 17") != std::string::npos);
  const auto back = read_feature_table(dir / "features.jsonl");
  CHECK(back == t);

  // Writing the read-back table reproduces the same bytes.
  write_feature_table(back, dir / "again.jsonl", 17);
  CHECK(read_text(dir / "again.jsonl") == read_text(dir / "features.jsonl"));
  CHECK(read_text(dir / "again.scaler.json") == read_text(dir / "features.scaler.json"));
}

TEST_CASE("feature table version and column errors") {
  TempDir dir;
  const auto t = testutil::random_table(5, 1);
  write_feature_table(t, dir / "f.jsonl");
  auto text = read_text(dir / "f.jsonl");
  auto bad = text;
  bad.replace(bad.find("\"version\":\"1\""), 13, "\"version\":\"2\"");
  write_text(dir / "f.jsonl", bad);
  CHECK(error_of([&] { read_feature_table(dir / "f.jsonl"); }).find("version") != std::string::npos);

  bad = text;
  const auto pos = bad.find("\"noise_raw\"");
  bad.replace(pos, 11, "\"noisy_raw\"");
  write_text(dir / "f.jsonl", bad);
  const auto msg = error_of([&] { read_feature_table(dir / "f.jsonl"); });
  CHECK(msg.find("noise_raw") != std::string::npos);
  CHECK(msg.find(":1") != std::string::npos);
}

TEST_CASE("feature table without side-car refits and marks ingested") {
  TempDir dir;
  const auto t = testutil::random_table(8, 2);
  write_feature_table(t, dir / "f.jsonl");
  std::filesystem::remove(dir / "f.scaler.json");
  const auto back = read_feature_table(dir / "f.jsonl");
  for (Dimension d : kAllDimensions) {
    CHECK(back.column(d).provenance == Provenance::ingested);
    CHECK(back.column(d).raw == t.column(d).raw);
    CHECK(back.column(d).scaler == t.column(d).scaler);
  }
}

TEST_CASE("side-car with only clip bounds is accepted") {
  TempDir dir;
  const auto t = testutil::random_table(8, 3);
  write_feature_table(t, dir / "f.jsonl");
  std::string side = "{\"version\":\"1\"";
  for (Dimension d : kAllDimensions) {
    side += ",\"" + std::string(to_string(d)) + "\":{\"clip_lo\":-1,\"clip_hi\":2}";
  }
  write_text(dir / "f.scaler.json", side + "}");
  const auto back = read_feature_table(dir / "f.jsonl");
  CHECK(back.column(Dimension::noise).scaler == ScalerParams{-1, 2, -1, 2});
}

TEST_CASE("feature table csv export") {
  TempDir dir;
  const auto t = testutil::make_table({{1, 2}, {3, 4}, {5, 6}, {7, 8}, {9, 10}, {11, 12}});
  write_feature_table_csv(t, dir / "f.csv");
  const auto text = read_text(dir / "f.csv");
  CHECK(text.rfind("id,ambiguity_raw,ambiguity_scaled,difficulty_raw", 0) == 0);
  CHECK(text.find("\ni00000,1,0,3,0,5,0,7,0,9,0,11,0\n") != std::string::npos);
}
