#include "ombudsman/classifier/metrics.hpp"

#include "ombudsman/error.hpp"

using nlohmann::json;

namespace ombudsman::classifier {

void to_json(json& j, const Confusion& c) { j = json{{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}}; }

void from_json(const json& j, Confusion& c) {
  c.tp = j.at("tp").get<std::size_t>();
  c.fp = j.at("fp").get<std::size_t>();
  c.tn = j.at("tn").get<std::size_t>();
  c.fn = j.at("fn").get<std::size_t>();
}

void to_json(json& j, const MacroMetrics& m) {
  auto cls = [](const ClassMetrics& c) { return json{{"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}}; };
  j = json{{"precision", m.precision}, {"recall", m.recall},       {"f1", m.f1},
           {"accuracy", m.accuracy},   {"per_class", {{"0", cls(m.negative)}, {"1", cls(m.positive)}}},
           {"confusion", m.confusion}, {"warnings", m.warnings}};
}

Confusion confusion_of(const std::vector<int>& predictions, const std::vector<int>& golds) {
  if (predictions.size() != golds.size()) {
    throw Error(ErrorCode::kInvalidArgument, "predictions (" + std::to_string(predictions.size()) + ") and golds (" +
                                                 std::to_string(golds.size()) + ") differ in length");
  }
  Confusion c;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    int p = predictions[i];
    int g = golds[i];
    if ((p != 0 && p != 1) || (g != 0 && g != 1)) {
      throw Error(ErrorCode::kInvalidArgument, "labels must be 0 or 1 (index " + std::to_string(i) + ")");
    }
    if (p == 1 && g == 1) ++c.tp;
    else if (p == 1) ++c.fp;
    else if (g == 0) ++c.tn;
    else ++c.fn;
  }
  return c;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace

MacroMetrics compute_macro_metrics(const std::vector<int>& predictions, const std::vector<int>& golds) {
  if (golds.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot compute metrics on empty input");
  MacroMetrics m;
  m.confusion = confusion_of(predictions, golds);
  const auto& c = m.confusion;
  m.positive = class_metrics(c.tp, c.fp, c.fn);
  m.negative = class_metrics(c.tn, c.fn, c.fp);
  if (c.tp + c.fp + c.fn == 0) m.warnings.emplace_back("class 1 absent from predictions and golds; its F1 is 0");
  if (c.tn + c.fn + c.fp == 0) m.warnings.emplace_back("class 0 absent from predictions and golds; its F1 is 0");
  m.precision = (m.positive.precision + m.negative.precision) / 2.0;
  m.recall = (m.positive.recall + m.negative.recall) / 2.0;
  m.f1 = (m.positive.f1 + m.negative.f1) / 2.0;
  m.accuracy = ratio(c.tp + c.tn, golds.size());
  return m;
}

}  // namespace ombudsman::classifier
