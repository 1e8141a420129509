#include <set>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "dataprism/data_model.hpp"
#include "dataprism/error.hpp"
#include "dataprism/features.hpp"
#include "dataprism/ingest.hpp"
#include "dataprism/irt.hpp"
#include "dataprism/metrics.hpp"
#include "dataprism/oodpredict.hpp"
#include "dataprism/report.hpp"
#include "dataprism/sampling.hpp"
#include "dataprism/similarity.hpp"
#include "dataprism/stats.hpp"

namespace py = pybind11;
namespace dp = dataprism;

namespace {

dp::metrics::MetricKind metric_of(const std::string& name) {
  auto m = dp::metrics::parse_metric(name);
  if (!m) throw dp::ValidationError("unknown metric '" + name + "'");
  return *m;
}

dp::Dimension dimension_of(const std::string& name) {
  auto d = dp::parse_dimension(name);
  if (!d) throw dp::ValidationError("unknown dimension '" + name + "'");
  return *d;
}

template <class T>
std::optional<T> opt(const py::object& o) {
  if (o.is_none()) return std::nullopt;
  return o.cast<T>();
}

dp::report::RunConfig run_config(const py::kwargs& kw) {
  dp::report::RunConfig c;
  auto get = [&](const char* k) -> py::object { return kw.contains(k) ? py::object(kw[k]) : py::none(); };
  for (const auto& item : kw) {
    static const std::set<std::string> known{"task", "instances", "predictions_dir", "traces", "pvi", "ppl",
                                             "features", "columns", "metric", "bins", "trials", "fraction",
                                             "seed", "out", "format", "irt_iterations", "irt_learning_rate"};
    const auto key = item.first.cast<std::string>();
    if (!known.count(key)) throw dp::ValidationError("unknown option '" + key + "'");
  }
  if (auto t = opt<std::string>(get("task"))) c.task = dp::parse_task_kind(*t);
  c.instances = opt<std::filesystem::path>(get("instances"));
  c.predictions_dir = opt<std::filesystem::path>(get("predictions_dir"));
  c.traces = opt<std::filesystem::path>(get("traces"));
  c.pvi = opt<std::filesystem::path>(get("pvi"));
  c.ppl = opt<std::filesystem::path>(get("ppl"));
  c.features = opt<std::filesystem::path>(get("features"));
  if (auto cols = opt<std::map<std::string, std::filesystem::path>>(get("columns"))) {
    for (const auto& [dim, path] : *cols) c.columns.emplace_back(dimension_of(dim), path);
  }
  if (auto m = opt<std::string>(get("metric"))) c.metric = metric_of(*m);
  if (auto v = opt<int>(get("bins"))) c.bins = *v;
  if (auto v = opt<int>(get("trials"))) c.trials = *v;
  if (auto v = opt<double>(get("fraction"))) c.fraction = *v;
  c.seed = opt<std::uint64_t>(get("seed"));
  if (auto v = opt<std::filesystem::path>(get("out"))) c.out = *v;
  if (auto f = opt<std::string>(get("format"))) {
    if (*f != "json" && *f != "csv") throw dp::ValidationError("format must be json or csv");
    c.format = *f == "json" ? dp::report::OutputFormat::json : dp::report::OutputFormat::csv;
  }
  if (auto v = opt<int>(get("irt_iterations"))) c.irt.iterations = *v;
  if (auto v = opt<double>(get("irt_learning_rate"))) c.irt.learning_rate = *v;
  c.validate();
  return c;
}

py::dict table_dict(const dp::FeatureTable& t) {
  py::dict out;
  out["ids"] = t.ids;
  for (dp::Dimension d : dp::kAllDimensions) {
    const auto& col = t.column(d);
    py::dict c;
    c["raw"] = col.raw;
    c["scaled"] = col.scaled;
    c["provenance"] = std::string(dp::to_string(col.provenance));
    out[py::str(std::string(dp::to_string(d)))] = c;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Data-centric evaluation toolkit";

  static py::exception<dp::ValidationError> validation_error(m, "ValidationError", PyExc_ValueError);
  static py::exception<dp::IoError> io_error(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const dp::ValidationError& e) {
      py::set_error(validation_error, e.what());
    } catch (const dp::IoError& e) {
      py::set_error(io_error, e.what());
    }
  });

  m.def("set_warnings", [](bool enabled) {
    dp::set_warning_handler(enabled ? dp::WarningHandler{[](const std::string& s) {
      py::gil_scoped_acquire gil;
      PyErr_WarnEx(PyExc_UserWarning, s.c_str(), 1);
    }}
                                    : dp::WarningHandler{});
  });

  // metrics
  m.def("normalize_answer", &dp::metrics::normalize_answer, py::arg("text"));
  m.def("qa_token_f1", [](const std::string& p, const std::vector<std::string>& g) {
    return dp::metrics::qa_token_f1(p, g);
  }, py::arg("prediction"), py::arg("golds"));
  m.def("qa_exact", [](const std::string& p, const std::vector<std::string>& g) {
    return dp::metrics::qa_exact(p, g);
  }, py::arg("prediction"), py::arg("golds"));
  m.def("cls_macro_f1", [](const std::vector<std::string>& p, const std::vector<std::string>& g) {
    return dp::metrics::cls_macro_f1(p, g);
  }, py::arg("predictions"), py::arg("golds"));

  // features
  m.def("ambiguity", [](std::vector<double> conf) { return dp::features::compute_ambiguity({"", std::move(conf)}); },
        py::arg("gold_conf"));
  m.def("difficulty", [](double p_full, double p_null) {
    return dp::features::compute_difficulty({"", p_full, p_null});
  }, py::arg("p_full"), py::arg("p_null"));
  m.def("perplexity", [](std::vector<double> lp) {
    return dp::features::compute_perplexity({"", std::move(lp)});
  }, py::arg("token_logprobs"));
  m.def("scale_column", [](const std::vector<double>& raw) {
    const auto p = dp::features::fit_scaler(raw);
    std::vector<double> out;
    for (double v : raw) out.push_back(dp::features::scale(v, p));
    return out;
  }, py::arg("raw"));
  m.def("read_features", [](const std::filesystem::path& p) { return table_dict(dp::ingest::read_feature_table(p)); },
        py::arg("path"));

  // statistics and similarity
  m.def("percentile", [](const std::vector<double>& v, double q) { return dp::stats::percentile(v, q); },
        py::arg("values"), py::arg("q"));
  m.def("kendall_tau", [](const std::vector<double>& a, const std::vector<double>& b) {
    return dp::stats::kendall_tau(a, b);
  }, py::arg("a"), py::arg("b"));
  m.def("bootstrap_bounds", [](std::vector<double> trials) {
    const auto b = dp::stats::bootstrap_bounds(std::move(trials));
    return std::pair{b.lower, b.upper};
  }, py::arg("trial_scores"));
  m.def("smd", [](const std::vector<double>& a, const std::vector<double>& b) { return dp::similarity::smd(a, b); },
        py::arg("a"), py::arg("b"));
  m.def("random_samples", [](const std::vector<std::string>& ids, double fraction, int trials, std::uint64_t seed) {
    std::vector<std::vector<std::string>> out;
    for (auto& s : dp::sampling::random_samples(ids, fraction, trials, seed)) out.push_back(std::move(s.instance_ids));
    return out;
  }, py::arg("ids"), py::arg("fraction"), py::arg("trials"), py::arg("seed"));

  // irt
  m.def("fit_2pl", [](const std::vector<std::vector<int>>& responses, int iterations, double learning_rate) {
    dp::irt::ResponseMatrix rm;
    for (std::size_t j = 0; j < responses.size(); ++j) {
      rm.model_ids.push_back("m" + std::to_string(j));
      if (j == 0) {
        for (std::size_t i = 0; i < responses[0].size(); ++i) rm.instance_ids.push_back("i" + std::to_string(i));
      }
      if (responses[j].size() != rm.instance_ids.size()) throw dp::ValidationError("ragged response matrix");
      for (int r : responses[j]) rm.responses.push_back(static_cast<std::uint8_t>(r));
    }
    dp::irt::FitConfig cfg;
    cfg.iterations = iterations;
    cfg.learning_rate = learning_rate;
    py::gil_scoped_release nogil;
    const auto fit = dp::irt::fit_2pl(rm, cfg);
    py::gil_scoped_acquire gil;
    py::dict out;
    out["ability"] = fit.params.ability;
    out["difficulty"] = fit.params.difficulty;
    out["discriminability"] = dp::irt::discriminability_column(fit.params);
    out["objective"] = fit.objective;
    out["best_iteration"] = fit.best_iteration;
    out["unidentifiable_items"] = fit.unidentifiable_items;
    return out;
  }, py::arg("responses"), py::arg("iterations") = 1000, py::arg("learning_rate") = 0.05);

  // ood regression on raw rows: x = (source score, six smd components)
  m.def("fit_ood", [](const std::vector<std::vector<double>>& x, const std::vector<double>& y, double ridge) {
    if (x.size() != y.size()) throw dp::ValidationError("x and y lengths differ");
    std::vector<dp::ood::OodInstance> rows;
    for (std::size_t r = 0; r < x.size(); ++r) {
      if (x[r].size() != dp::ood::kNumInputs) throw dp::ValidationError("each row needs 7 inputs");
      dp::ood::OodInstance in;
      std::copy(x[r].begin(), x[r].end(), in.x.begin());
      in.y = y[r];
      rows.push_back(in);
    }
    const auto model = dp::ood::fit_ols(rows, ridge);
    py::dict out;
    out["weights"] = std::vector<double>(model.weights.begin(), model.weights.end());
    out["bias"] = model.bias;
    const auto imp = dp::ood::feature_importance(model);
    py::dict importance;
    for (dp::Dimension d : dp::kAllDimensions) {
      importance[py::str(std::string(dp::to_string(d)))] = imp[static_cast<std::size_t>(d)];
    }
    out["importance"] = importance;
    return out;
  }, py::arg("x"), py::arg("y"), py::arg("ridge") = 1e-8);

  // pipeline commands, mirroring the CLI
  m.def("features", [](const py::kwargs& kw) { return table_dict(dp::report::cmd_features(run_config(kw))); });
  m.def("analyze", [](const py::kwargs& kw) { dp::report::cmd_analyze(run_config(kw)); });
  m.def("sample", [](const py::kwargs& kw) { dp::report::cmd_sample(run_config(kw)); });
  m.def("compare", [](const std::filesystem::path& a, const std::filesystem::path& b, std::vector<double> subsample,
                      int subsample_trials, const py::kwargs& kw) {
    dp::report::CompareOptions o{a, b, std::nullopt, std::nullopt, std::move(subsample), subsample_trials};
    dp::report::cmd_compare(run_config(kw), o);
  }, py::arg("features_a"), py::arg("features_b"), py::arg("subsample") = std::vector<double>{},
     py::arg("subsample_trials") = 20);
  m.def("predict_ood", [](const std::filesystem::path& scores, const std::filesystem::path& pairs,
                          std::size_t holdout, int repeats, double ridge, const py::kwargs& kw) {
    dp::report::cmd_predict_ood(run_config(kw), {scores, pairs, holdout, repeats, ridge});
  }, py::arg("scores"), py::arg("pairs"), py::arg("holdout") = 1, py::arg("repeats") = 5,
     py::arg("ridge") = 1e-8);
  m.def("compare_models", [](const std::string& m1, const std::string& m2, const std::string& dim,
                             const py::kwargs& kw) {
    dp::report::cmd_compare_models(run_config(kw), m1, m2, dimension_of(dim));
  }, py::arg("model_1"), py::arg("model_2"), py::arg("dimension"));
}
