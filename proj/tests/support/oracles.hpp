#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ombudsman/corpus/post.hpp"

// Reference implementations written from the textbook definitions, kept
// deliberately naive so they share no code path with the library.
namespace ombudsman::test::oracle {

// Nominal alpha from pairable values: 1 - D_o / D_e, with observed
// disagreement summed over ordered within-unit pairs weighted 1/(m_u - 1)
// and expected disagreement over every ordered pair of pairable values.
std::optional<double> alpha(const std::vector<std::vector<int>>& units);

// (p_o - p_e) / (1 - p_e) from marginal counts.
std::optional<double> kappa(const std::vector<int>& a, const std::vector<int>& b);

struct Macro {
  double precision = 0, recall = 0, f1 = 0, accuracy = 0;
};

// Per-class counts by direct loops, then the unweighted class mean.
Macro macro(const std::vector<int>& preds, const std::vector<int>& golds);

// Lowercased substring test against the text, plus container fields for
// yt_politics posts.
bool keyword_match(const corpus::Post& post, const std::vector<std::string>& keywords);

// Entailment the rule NLI backend should return.
double rule_entailment(const std::string& text);

}  // namespace ombudsman::test::oracle
