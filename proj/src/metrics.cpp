#include "dataprism/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>

#include "dataprism/error.hpp"

namespace dataprism::metrics {
namespace {

struct CodeRange {
  char32_t lo;
  char32_t hi;
};

constexpr CodeRange kPunctuation[] = {
#include "unicode_punct_table.inc"
};

bool is_punctuation(char32_t cp) {
  auto it = std::upper_bound(std::begin(kPunctuation), std::end(kPunctuation), cp,
                             [](char32_t v, const CodeRange& r) { return v < r.lo; });
  if (it == std::begin(kPunctuation)) return false;
  --it;
  return cp <= it->hi;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f' || c == '\r';
}

// Decodes one UTF-8 sequence starting at text[pos]. Returns its length, or 0
// if the bytes are not valid UTF-8.
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& out) {
  const auto b0 = static_cast<unsigned char>(text[pos]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    out = b0;
    return 1;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (pos + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(text[pos + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  out = cp;
  return len;
}

bool is_article(const std::string& token) {
  return token == "a" || token == "an" || token == "the";
}

double token_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
  if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
  std::unordered_map<std::string, int> counts;
  for (const auto& t : gold) ++counts[t];
  int common = 0;
  for (const auto& t : pred) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(common) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

void require_golds(std::span<const std::string> golds) {
  if (golds.empty()) throw ValidationError("gold answer list is empty");
}

}  // namespace

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::qa_token_f1:
      return "qa_token_f1";
    case MetricKind::qa_exact:
      return "qa_exact";
    case MetricKind::cls_accuracy:
      return "cls_accuracy";
    case MetricKind::cls_macro_f1:
      return "cls_macro_f1";
  }
  return "unknown";
}

std::optional<MetricKind> parse_metric(std::string_view name) {
  for (auto k : {MetricKind::qa_token_f1, MetricKind::qa_exact, MetricKind::cls_accuracy,
                 MetricKind::cls_macro_f1}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

bool applicable(MetricKind kind, TaskKind task) {
  const bool qa = kind == MetricKind::qa_token_f1 || kind == MetricKind::qa_exact;
  return qa == (task == TaskKind::extractive_qa);
}

bool per_instance(MetricKind kind) { return kind != MetricKind::cls_macro_f1; }

std::vector<std::string> normalize_answer(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !is_article(current)) tokens.push_back(current);
    current.clear();
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto byte = static_cast<unsigned char>(text[pos]);
    if (is_space(byte)) {
      flush();
      ++pos;
      continue;
    }
    char32_t cp = 0;
    const std::size_t len = decode_utf8(text, pos, cp);
    if (len == 0) {
      current.push_back(text[pos]);
      ++pos;
      continue;
    }
    if (!is_punctuation(cp)) {
      if (len == 1 && byte >= 'A' && byte <= 'Z') {
        current.push_back(static_cast<char>(byte - 'A' + 'a'));
      } else {
        current.append(text.substr(pos, len));
      }
    }
    pos += len;
  }
  flush();
  return tokens;
}

double qa_token_f1(std::string_view prediction, std::span<const std::string> golds) {
  require_golds(golds);
  const auto pred = normalize_answer(prediction);
  double best = 0.0;
  for (const auto& g : golds) best = std::max(best, token_f1(pred, normalize_answer(g)));
  return best;
}

double qa_exact(std::string_view prediction, std::span<const std::string> golds) {
  require_golds(golds);
  const auto pred = normalize_answer(prediction);
  for (const auto& g : golds) {
    if (normalize_answer(g) == pred) return 1.0;
  }
  return 0.0;
}

double cls_accuracy(std::string_view prediction, std::span<const std::string> golds) {
  require_golds(golds);
  return std::find(golds.begin(), golds.end(), prediction) != golds.end() ? 1.0 : 0.0;
}

double cls_macro_f1(std::span<const std::string> predictions, std::span<const std::string> golds) {
  if (predictions.size() != golds.size()) {
    throw ValidationError("macro-F1 needs one prediction per gold label");
  }
  if (golds.empty()) return 1.0;
  struct Counts {
    int tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> per_label;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (predictions[i] == golds[i]) {
      ++per_label[golds[i]].tp;
    } else {
      ++per_label[predictions[i]].fp;
      ++per_label[golds[i]].fn;
    }
  }
  double sum = 0.0;
  for (const auto& [label, c] : per_label) {
    sum += 2.0 * c.tp / static_cast<double>(2 * c.tp + c.fp + c.fn);
  }
  return sum / static_cast<double>(per_label.size());
}

double score(MetricKind kind, TaskKind task, std::string_view prediction,
             std::span<const std::string> golds) {
  if (!applicable(kind, task)) {
    throw ValidationError("metric " + std::string(to_string(kind)) + " does not apply to " +
                          std::string(dataprism::to_string(task)) + " data");
  }
  switch (kind) {
    case MetricKind::qa_token_f1:
      return qa_token_f1(prediction, golds);
    case MetricKind::qa_exact:
      return qa_exact(prediction, golds);
    case MetricKind::cls_accuracy:
      return cls_accuracy(prediction, golds);
    case MetricKind::cls_macro_f1:
      break;
  }
  throw ValidationError("cls_macro_f1 is aggregate-only and has no per-instance score");
}

}  // namespace dataprism::metrics
