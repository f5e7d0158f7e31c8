#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::classifier {

// Counts with 1 as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  bool operator==(const Confusion&) const = default;
};

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct MacroMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double accuracy = 0;
  ClassMetrics negative;  // class 0
  ClassMetrics positive;  // class 1
  Confusion confusion;
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const Confusion& c);
void from_json(const nlohmann::json& j, Confusion& c);
void to_json(nlohmann::json& j, const MacroMetrics& m);

Confusion confusion_of(const std::vector<int>& predictions, const std::vector<int>& golds);

// Unweighted mean over classes 0 and 1 of per-class precision, recall and
// F1; accuracy is the fraction correct. A ratio with a zero denominator is
// 0, and a class absent from both vectors contributes F1 = 0 with a warning.
// Throws Error(kInvalidArgument) on length mismatch, empty input or labels
// outside {0, 1}.
MacroMetrics compute_macro_metrics(const std::vector<int>& predictions, const std::vector<int>& golds);

}  // namespace ombudsman::classifier
