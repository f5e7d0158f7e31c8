#pragma once

#include <string>

#include "ombudsman/cascade/backend.hpp"

namespace ombudsman::cascade {

struct HttpBackendOptions {
  std::string endpoint;
  std::string model_identifier;
  std::string api_key_env;  // sent as a bearer token when set
  int timeout_seconds = 60;
};

// POST {endpoint} {"premise", "hypothesis", "model"}. Accepts either
// {"entailment", "contradiction", "neutral"} or the list form
// [{"label": "ENTAILMENT", "score": ...}, ...] (optionally nested once).
class HttpNliBackend final : public NliBackend {
 public:
  HttpNliBackend(HttpBackendOptions options, std::size_t max_premise_chars = 2000);
  std::string model_identifier() const override { return options_.model_identifier; }
  std::size_t max_premise_chars() const override { return max_premise_chars_; }
  NliScores infer(std::string_view premise, std::string_view hypothesis) override;

 private:
  HttpBackendOptions options_;
  std::size_t max_premise_chars_;
};

// OpenAI-compatible chat completion: POST {endpoint}/chat/completions with a
// single user message; returns choices[0].message.content.
class OpenAiChatBackend final : public GenerativeBackend {
 public:
  OpenAiChatBackend(HttpBackendOptions options, double temperature = 0.0, int max_tokens = 2048);
  std::string model_identifier() const override { return options_.model_identifier; }
  std::string generate(std::string_view prompt) override;

 private:
  HttpBackendOptions options_;
  double temperature_;
  int max_tokens_;
};

}  // namespace ombudsman::cascade
