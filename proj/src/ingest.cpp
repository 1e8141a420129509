#include "dataprism/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <system_error>

#include <nlohmann/json.hpp>

#include "dataprism/error.hpp"
#include "dataprism/features.hpp"

namespace dataprism::ingest {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class LineError {
 public:
  LineError(const fs::path& path, std::size_t line) : where_(path.string() + ":" + std::to_string(line)) {}
  [[noreturn]] void fail(const std::string& msg) const { throw ValidationError(where_ + ": " + msg); }

 private:
  std::string where_;
};

// Calls fn(object, line_number) for every non-blank line.
void for_each_line(const fs::path& path, const std::function<void(const json&, const LineError&)>& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    const LineError where(path, line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      where.fail(std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) where.fail("expected a JSON object");
    fn(obj, where);
  }
  if (in.bad()) throw IoError("read error on " + path.string());
}

const json& field(const json& obj, const char* name, const LineError& where) {
  auto it = obj.find(name);
  if (it == obj.end()) where.fail(std::string("missing required field \"") + name + "\"");
  return *it;
}

std::string string_field(const json& obj, const char* name, const LineError& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_string()) where.fail(std::string("field \"") + name + "\" must be a string");
  return v.get<std::string>();
}

std::string id_field(const json& obj, const LineError& where) {
  auto id = string_field(obj, "id", where);
  if (id.empty()) where.fail("field \"id\" must be nonempty");
  return id;
}

double number_field(const json& obj, const char* name, const LineError& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_number()) where.fail(std::string("field \"") + name + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) where.fail(std::string("field \"") + name + "\" must be finite");
  return d;
}

std::vector<std::string> string_list(const json& v, const char* name, const LineError& where) {
  if (!v.is_array()) where.fail(std::string("field \"") + name + "\" must be an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) where.fail(std::string("field \"") + name + "\" must be an array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> number_list(const json& obj, const char* name, const LineError& where) {
  const auto& v = field(obj, name, where);
  if (!v.is_array()) where.fail(std::string("field \"") + name + "\" must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) where.fail(std::string("field \"") + name + "\" must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

class IdSet {
 public:
  void add(const std::string& id, const LineError& where) {
    if (!ids_.insert(id).second) where.fail("duplicate id \"" + id + "\"");
  }

 private:
  std::set<std::string> ids_;
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write error on " + path.string());
}

template <typename Rows, typename Fn>
void write_lines(const Rows& rows, const fs::path& path, Fn&& to_json) {
  auto out = open_out(path);
  for (const auto& r : rows) out << to_json(r).dump() << '\n';
  finish(out, path);
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw ValidationError("cannot format number");
  return std::string(buf, ptr);
}

Dataset parse_instances(const fs::path& path, TaskKind task_kind) {
  Dataset ds;
  ds.name = path.stem().string();
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    Instance inst;
    inst.id = id_field(obj, where);
    ids.add(inst.id, where);
    inst.task_kind = task_kind;
    inst.text_a = string_field(obj, "text_a", where);
    inst.text_b = string_field(obj, "text_b", where);
    inst.gold = string_list(field(obj, "gold", where), "gold", where);
    if (inst.gold.empty()) where.fail("field \"gold\" must be nonempty");
    if (task_kind == TaskKind::classification && inst.gold.size() != 1) {
      where.fail("classification instances need exactly one gold label");
    }
    if (auto it = obj.find("annotator_labels"); it != obj.end()) {
      inst.annotator_labels = string_list(*it, "annotator_labels", where);
    }
    ds.instances.push_back(std::move(inst));
  });
  if (ds.empty()) warn(path.string() + " contains no instances");
  return ds;
}

void write_instances(const Dataset& dataset, const fs::path& path) {
  write_lines(dataset.instances, path, [](const Instance& inst) {
    return ordered_json{{"id", inst.id},
                        {"text_a", inst.text_a},
                        {"text_b", inst.text_b},
                        {"gold", inst.gold},
                        {"annotator_labels", inst.annotator_labels}};
  });
}

PredictionSet parse_predictions(const fs::path& path) {
  PredictionSet ps;
  ps.model_id = path.stem().string();
  IdSet ids;
  bool first = true;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    const bool is_first = std::exchange(first, false);
    if (is_first && obj.contains("model_id") && !obj.contains("id")) {
      ps.model_id = string_field(obj, "model_id", where);
      if (ps.model_id.empty()) where.fail("field \"model_id\" must be nonempty");
      return;
    }
    const std::string id = id_field(obj, where);
    ids.add(id, where);
    ps.predictions.emplace(id, string_field(obj, "prediction", where));
    if (auto it = obj.find("probabilities"); it != obj.end()) {
      if (!it->is_object()) where.fail("field \"probabilities\" must be an object");
      ClassProbabilities probs;
      double total = 0.0;
      for (const auto& [label, p] : it->items()) {
        if (!p.is_number()) where.fail("probability for \"" + label + "\" must be a number");
        const double v = p.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) where.fail("probability for \"" + label + "\" outside [0,1]");
        probs.emplace(label, v);
        total += v;
      }
      if (std::abs(total - 1.0) > 1e-6) {
        where.fail("probabilities sum to " + format_double(total) + ", expected 1");
      }
      ps.class_probabilities.emplace(id, std::move(probs));
    }
  });
  return ps;
}

void write_predictions(const PredictionSet& preds, const fs::path& path) {
  auto out = open_out(path);
  out << ordered_json{{"model_id", preds.model_id}}.dump() << '\n';
  std::vector<std::string> ids;
  for (const auto& [id, _] : preds.predictions) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    ordered_json row{{"id", id}, {"prediction", preds.predictions.at(id)}};
    if (auto it = preds.class_probabilities.find(id); it != preds.class_probabilities.end()) {
      row["probabilities"] = it->second;
    }
    out << row.dump() << '\n';
  }
  finish(out, path);
}

std::vector<PredictionSet> parse_predictions_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<PredictionSet> out;
  for (const auto& f : files) out.push_back(parse_predictions(f));
  if (out.empty()) warn(dir.string() + " holds no *.jsonl prediction files");
  return out;
}

std::vector<TraceRecord> parse_traces(const fs::path& path) {
  std::vector<TraceRecord> out;
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    TraceRecord r{id_field(obj, where), number_list(obj, "gold_conf", where)};
    ids.add(r.id, where);
    if (r.gold_conf.size() < 2) where.fail("\"gold_conf\" needs at least 2 epochs");
    for (double c : r.gold_conf) {
      if (!(c >= 0.0 && c <= 1.0)) where.fail("\"gold_conf\" entries must lie in [0,1]");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PviRecord> parse_pvi(const fs::path& path) {
  std::vector<PviRecord> out;
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    PviRecord r{id_field(obj, where), number_field(obj, "p_full", where), number_field(obj, "p_null", where)};
    ids.add(r.id, where);
    if (!(r.p_full > 0.0 && r.p_full <= 1.0)) where.fail("\"p_full\" must lie in (0,1]");
    if (!(r.p_null > 0.0 && r.p_null <= 1.0)) where.fail("\"p_null\" must lie in (0,1]");
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<PerplexityRecord> parse_perplexity(const fs::path& path) {
  std::vector<PerplexityRecord> out;
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    PerplexityRecord r{id_field(obj, where), number_list(obj, "token_logprobs", where)};
    ids.add(r.id, where);
    if (r.token_logprobs.empty()) where.fail("\"token_logprobs\" must be nonempty");
    for (double lp : r.token_logprobs) {
      if (!(lp <= 0.0)) where.fail("\"token_logprobs\" entries must be <= 0");
    }
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ColumnRecord> parse_column(const fs::path& path) {
  std::vector<ColumnRecord> out;
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    ColumnRecord r{id_field(obj, where), number_field(obj, "value", where)};
    ids.add(r.id, where);
    out.push_back(std::move(r));
  });
  return out;
}

void write_traces(const std::vector<TraceRecord>& records, const fs::path& path) {
  write_lines(records, path, [](const TraceRecord& r) {
    return ordered_json{{"id", r.id}, {"gold_conf", r.gold_conf}};
  });
}

void write_pvi(const std::vector<PviRecord>& records, const fs::path& path) {
  write_lines(records, path, [](const PviRecord& r) {
    return ordered_json{{"id", r.id}, {"p_full", r.p_full}, {"p_null", r.p_null}};
  });
}

void write_perplexity(const std::vector<PerplexityRecord>& records, const fs::path& path) {
  write_lines(records, path, [](const PerplexityRecord& r) {
    return ordered_json{{"id", r.id}, {"token_logprobs", r.token_logprobs}};
  });
}

fs::path scaler_sidecar_path(const fs::path& features_path) {
  fs::path p = features_path;
  p.replace_filename(features_path.stem().string() + ".scaler.json");
  return p;
}

void write_feature_table(const FeatureTable& table, const fs::path& path,
                         std::optional<std::uint64_t> seed) {
  table.validate();
  auto out = open_out(path);
  for (std::size_t i = 0; i < table.size(); ++i) {
    ordered_json row{{"version", kSchemaVersion}, {"id", table.ids[i]}};
    for (Dimension d : kAllDimensions) {
      const std::string name(to_string(d));
      row[name + "_raw"] = table.column(d).raw[i];
      row[name + "_scaled"] = table.column(d).scaled[i];
    }
    out << row.dump() << '\n';
  }
  finish(out, path);

  ordered_json side{{"version", kSchemaVersion}};
  if (seed) side["seed"] = *seed;
  for (Dimension d : kAllDimensions) {
    const auto& col = table.column(d);
    side[std::string(to_string(d))] = ordered_json{{"clip_lo", col.scaler.clip_lo},
                                                   {"clip_hi", col.scaler.clip_hi},
                                                   {"min", col.scaler.min},
                                                   {"max", col.scaler.max},
                                                   {"provenance", to_string(col.provenance)}};
  }
  const fs::path side_path = scaler_sidecar_path(path);
  auto side_out = open_out(side_path);
  side_out << side.dump(2) << '\n';
  finish(side_out, side_path);
}

FeatureTable read_feature_table(const fs::path& path) {
  FeatureTable table;
  IdSet ids;
  for_each_line(path, [&](const json& obj, const LineError& where) {
    const std::string version = string_field(obj, "version", where);
    if (version != kSchemaVersion) {
      where.fail("unsupported feature table version \"" + version + "\" (expected \"" +
                 kSchemaVersion + "\")");
    }
    const std::string id = id_field(obj, where);
    ids.add(id, where);
    table.ids.push_back(id);
    for (Dimension d : kAllDimensions) {
      const std::string name(to_string(d));
      auto& col = table.column(d);
      col.raw.push_back(number_field(obj, (name + "_raw").c_str(), where));
      col.scaled.push_back(number_field(obj, (name + "_scaled").c_str(), where));
    }
  });

  const fs::path side_path = scaler_sidecar_path(path);
  if (fs::exists(side_path)) {
    std::ifstream in(side_path);
    if (!in) throw IoError("cannot open " + side_path.string());
    json side;
    try {
      side = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ValidationError(side_path.string() + ": malformed JSON: " + e.what());
    }
    const LineError where(side_path, 1);
    if (string_field(side, "version", where) != kSchemaVersion) {
      where.fail("unsupported scaler side-car version");
    }
    for (Dimension d : kAllDimensions) {
      const std::string name(to_string(d));
      const json& s = field(side, name.c_str(), where);
      auto& col = table.column(d);
      const double lo = number_field(s, "clip_lo", where);
      const double hi = number_field(s, "clip_hi", where);
      // min/max equal the clip bounds unless stored explicitly.
      col.scaler = ScalerParams{lo, hi, s.contains("min") ? number_field(s, "min", where) : lo,
                                s.contains("max") ? number_field(s, "max", where) : hi};
      const std::string prov = s.value("provenance", std::string("computed"));
      col.provenance = prov == "ingested" ? Provenance::ingested : Provenance::computed;
    }
  } else {
    for (Dimension d : kAllDimensions) {
      auto& col = table.column(d);
      if (!col.raw.empty()) col.scaler = features::fit_scaler(col.raw);
      col.provenance = Provenance::ingested;
    }
  }
  table.validate();
  return table;
}

void write_feature_table_csv(const FeatureTable& table, const fs::path& path) {
  auto out = open_out(path);
  out << "id";
  for (Dimension d : kAllDimensions) out << ',' << to_string(d) << "_raw," << to_string(d) << "_scaled";
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& id = table.ids[i];
    if (id.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char c : id) {
        if (c == '"') quoted += '"';
        quoted += c;
      }
      out << quoted << '"';
    } else {
      out << id;
    }
    for (Dimension d : kAllDimensions) {
      out << ',' << format_double(table.column(d).raw[i]) << ','
          << format_double(table.column(d).scaled[i]);
    }
    out << '\n';
  }
  finish(out, path);
}

}  // namespace dataprism::ingest
