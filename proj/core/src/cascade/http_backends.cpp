#include "ombudsman/cascade/http_backends.hpp"

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "../http_post.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/text.hpp"

using nlohmann::json;

namespace ombudsman::cascade {

namespace {

std::vector<std::pair<std::string, std::string>> auth_headers(const HttpBackendOptions& o) {
  if (o.api_key_env.empty()) return {};
  const char* key = std::getenv(o.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorCode::kConfig, "environment variable " + o.api_key_env + " is not set");
  }
  return {{"Authorization", std::string("Bearer ") + key}};
}

NliScores scores_from(const json& body) {
  NliScores s;
  if (body.is_object()) {
    s.entailment = body.at("entailment").get<double>();
    s.contradiction = body.at("contradiction").get<double>();
    s.neutral = body.at("neutral").get<double>();
    return s;
  }
  const json& list = (body.is_array() && !body.empty() && body[0].is_array()) ? body[0] : body;
  bool seen[3] = {false, false, false};
  for (const auto& item : list) {
    auto label = text::ascii_lower(item.at("label").get<std::string>());
    double score = item.at("score").get<double>();
    if (label.rfind("entail", 0) == 0) {
      s.entailment = score;
      seen[0] = true;
    } else if (label.rfind("contradict", 0) == 0) {
      s.contradiction = score;
      seen[1] = true;
    } else if (label.rfind("neutral", 0) == 0) {
      s.neutral = score;
      seen[2] = true;
    }
  }
  if (!(seen[0] && seen[1] && seen[2])) throw Error(ErrorCode::kBackend, "NLI response lacks one of the labels");
  return s;
}

}  // namespace

HttpNliBackend::HttpNliBackend(HttpBackendOptions options, std::size_t max_premise_chars)
    : options_(std::move(options)), max_premise_chars_(max_premise_chars) {}

NliScores HttpNliBackend::infer(std::string_view premise, std::string_view hypothesis) {
  json req = {{"premise", premise}, {"hypothesis", hypothesis}, {"model", options_.model_identifier}};
  auto res = detail::post_json(options_.endpoint, req.dump(), auth_headers(options_), options_.timeout_seconds);
  detail::check_status(res, "NLI endpoint");
  NliScores s;
  try {
    s = scores_from(json::parse(res.body));
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackend, std::string("malformed NLI response: ") + ex.what());
  }
  if (!is_valid(s)) throw Error(ErrorCode::kBackend, "NLI scores do not form a probability triple");
  return s;
}

OpenAiChatBackend::OpenAiChatBackend(HttpBackendOptions options, double temperature, int max_tokens)
    : options_(std::move(options)), temperature_(temperature), max_tokens_(max_tokens) {}

std::string OpenAiChatBackend::generate(std::string_view prompt) {
  json req = {{"model", options_.model_identifier},
              {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
              {"temperature", temperature_},
              {"max_tokens", max_tokens_}};
  std::string url = options_.endpoint;
  while (!url.empty() && url.back() == '/') url.pop_back();
  auto res = detail::post_json(url + "/chat/completions", req.dump(), auth_headers(options_),
                               options_.timeout_seconds);
  detail::check_status(res, "chat endpoint");
  try {
    return json::parse(res.body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackend, std::string("malformed chat response: ") + ex.what());
  }
}

}  // namespace ombudsman::cascade
