#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/masking/ner.hpp"

namespace ombudsman::cascade {

// Deterministic stand-ins for the NLI and generative models, used by tests,
// fixtures and offline runs. Their rules are simple enough to recompute by
// hand.

// Entailment grows with the number of distinct infrastructure cue stems in
// the casefolded premise: e = min(0.95, 0.25 * hits), contradiction =
// (1 - e) / 2, neutral takes the rest. Two hits give exactly 0.5.
// A premise containing "#mock-nli-error" makes infer() throw Error(kBackend).
class RuleNliBackend final : public NliBackend {
 public:
  static const std::vector<std::string>& cue_stems();
  static constexpr std::string_view kErrorSentinel = "#mock-nli-error";

  std::string model_identifier() const override { return "rule-nli@1"; }
  NliScores infer(std::string_view premise, std::string_view hypothesis) override;
};

// A comment is a concern when the gazetteer finds a location in it and it
// contains a future-tense cue. Leaning follows party words; otherwise
// "bipartisan". Replies wrap the JSON in chatty prose and a markdown fence.
//
// Annotation prompts: reads the array after the last "Comments:" and answers
// [{"id", "concern", "locations", "leaning"}]. Comments containing
// "#mock-omit" are left out of the reply.
// Zero-shot prompts: reads the object after the last "Input:" and answers
// {"id", "rating"}.
// A prompt with neither marker gets a refusal.
class RuleGenerativeBackend final : public GenerativeBackend {
 public:
  static constexpr std::string_view kOmitSentinel = "#mock-omit";

  RuleGenerativeBackend();
  std::string model_identifier() const override { return "rule-llm@1"; }
  std::string generate(std::string_view prompt) override;

  // The rule itself, exposed for tests and the rule classifier.
  static bool has_future_cue(std::string_view text);
  static std::string leaning(std::string_view text);

 private:
  std::shared_ptr<masking::NerBackend> ner_;
};

}  // namespace ombudsman::cascade
