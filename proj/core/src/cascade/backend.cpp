#include "ombudsman/cascade/backend.hpp"

#include <cmath>
#include <set>

#include "ombudsman/cascade/http_backends.hpp"
#include "ombudsman/cascade/rule_backends.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::cascade {

std::string_view to_string(BackendKind k) { return k == BackendKind::kNli ? "nli" : "generative"; }

bool is_valid(const NliScores& s) {
  for (double v : {s.entailment, s.contradiction, s.neutral}) {
    if (!(v >= 0.0 && v <= 1.0)) return false;
  }
  return std::abs(s.entailment + s.contradiction + s.neutral - 1.0) <= 1e-6;
}

ReplayCache::ReplayCache(fs::path path, Mode mode) : path_(std::move(path)), mode_(mode) {
  if (mode_ != Mode::kOff && fs::exists(path_)) {
    for (auto& row : read_jsonl(path_)) {
      entries_[row.at("key").get<std::string>()] = row.at("response");
    }
  }
}

std::optional<json> ReplayCache::lookup(const std::string& key) const {
  std::shared_lock lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return std::optional<json>(std::in_place, it->second);
}

void ReplayCache::store(const std::string& key, const json& meta, const json& response) {
  if (mode_ != Mode::kRecord) return;
  std::unique_lock lock(mutex_);
  if (entries_.contains(key)) return;
  entries_[key] = response;
  json row = meta;
  row["key"] = key;
  row["response"] = response;
  append_jsonl(path_, {row});
}

std::size_t ReplayCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

std::string ReplayCache::request_key(BackendKind kind, std::string_view model, std::string_view request) {
  std::string material(to_string(kind));
  material.push_back('\x1f');
  material.append(model);
  material.push_back('\x1f');
  material.append(request);
  return sha256_hex(material);
}

ReplayCache::Mode parse_replay_mode(std::string_view s) {
  if (s == "record") return ReplayCache::Mode::kRecord;
  if (s == "replay") return ReplayCache::Mode::kReplay;
  if (s == "off") return ReplayCache::Mode::kOff;
  throw Error(ErrorCode::kConfig, "replay_cache.mode must be record|replay|off");
}

namespace {

class ReplayNli final : public NliBackend {
 public:
  ReplayNli(std::shared_ptr<NliBackend> inner, std::shared_ptr<ReplayCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string model_identifier() const override { return inner_->model_identifier(); }
  std::size_t max_premise_chars() const override { return inner_->max_premise_chars(); }

  NliScores infer(std::string_view premise, std::string_view hypothesis) override {
    std::string request = json{{"premise", premise}, {"hypothesis", hypothesis}}.dump();
    auto key = ReplayCache::request_key(kind(), model_identifier(), request);
    if (cache_->mode() != ReplayCache::Mode::kOff) {
      if (auto hit = cache_->lookup(key)) {
        return NliScores{hit->at("entailment").get<double>(), hit->at("contradiction").get<double>(),
                         hit->at("neutral").get<double>()};
      }
      if (cache_->mode() == ReplayCache::Mode::kReplay) {
        throw Error(ErrorCode::kNotFound, "replay cache miss for nli request " + short_hash(key));
      }
    }
    auto s = inner_->infer(premise, hypothesis);
    cache_->store(key, {{"kind", "nli"}, {"model", model_identifier()}, {"request", request}},
                  {{"entailment", s.entailment}, {"contradiction", s.contradiction}, {"neutral", s.neutral}});
    return s;
  }

 private:
  std::shared_ptr<NliBackend> inner_;
  std::shared_ptr<ReplayCache> cache_;
};

class ReplayGenerative final : public GenerativeBackend {
 public:
  ReplayGenerative(std::shared_ptr<GenerativeBackend> inner, std::shared_ptr<ReplayCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string model_identifier() const override { return inner_->model_identifier(); }

  std::string generate(std::string_view prompt) override {
    auto key = ReplayCache::request_key(kind(), model_identifier(), prompt);
    if (cache_->mode() != ReplayCache::Mode::kOff) {
      if (auto hit = cache_->lookup(key)) return hit->get<std::string>();
      if (cache_->mode() == ReplayCache::Mode::kReplay) {
        throw Error(ErrorCode::kNotFound, "replay cache miss for generative request " + short_hash(key));
      }
    }
    auto text = inner_->generate(prompt);
    cache_->store(key, {{"kind", "generative"}, {"model", model_identifier()}}, text);
    return text;
  }

 private:
  std::shared_ptr<GenerativeBackend> inner_;
  std::shared_ptr<ReplayCache> cache_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

std::shared_ptr<NliBackend> with_replay(std::shared_ptr<NliBackend> inner, std::shared_ptr<ReplayCache> cache) {
  return std::make_shared<ReplayNli>(std::move(inner), std::move(cache));
}

std::shared_ptr<GenerativeBackend> with_replay(std::shared_ptr<GenerativeBackend> inner,
                                               std::shared_ptr<ReplayCache> cache) {
  return std::make_shared<ReplayGenerative>(std::move(inner), std::move(cache));
}

std::vector<std::string> backend_section_violations(const json& section) {
  std::vector<std::string> out;
  if (!section.is_object()) return {"backends must be an object"};
  static const std::set<std::string> kKeys = {"nli", "generative", "replay_cache"};
  for (const auto& [k, _] : section.items()) {
    if (!kKeys.contains(k)) out.push_back("unknown key 'backends." + k + "'");
  }
  auto check = [&](const char* name, std::set<std::string> types, std::set<std::string> keys) {
    if (!section.contains(name)) {
      out.push_back(std::string("backends.") + name + " is required");
      return;
    }
    const auto& b = section[name];
    if (!b.is_object()) {
      out.push_back(std::string("backends.") + name + " must be an object");
      return;
    }
    std::string type = b.value("type", std::string{});
    if (!types.contains(type)) out.push_back(std::string("backends.") + name + ".type '" + type + "' is not supported");
    keys.insert("type");
    for (const auto& [k, _] : b.items()) {
      if (!keys.contains(k)) out.push_back(std::string("unknown key 'backends.") + name + "." + k + "'");
    }
    if (type != "rule" && b.value("endpoint", std::string{}).empty()) {
      out.push_back(std::string("backends.") + name + ".endpoint is required for type " + type);
    }
  };
  check("nli", {"rule", "http"},
        {"model_identifier", "endpoint", "api_key_env", "max_premise_chars", "timeout_seconds"});
  check("generative", {"rule", "openai"},
        {"model_identifier", "endpoint", "api_key_env", "temperature", "max_tokens", "timeout_seconds"});
  if (section.contains("replay_cache")) {
    const auto& rc = section["replay_cache"];
    for (const auto& [k, _] : rc.items()) {
      if (k != "path" && k != "mode") out.push_back("unknown key 'backends.replay_cache." + k + "'");
    }
    auto mode = rc.value("mode", std::string{"record"});
    if (mode != "record" && mode != "replay" && mode != "off") {
      out.push_back("backends.replay_cache.mode must be record|replay|off");
    }
    if (!rc.contains("path")) out.push_back("backends.replay_cache.path is required");
  }
  return out;
}

Backends make_backends(const json& section, const fs::path& base_dir) {
  auto problems = backend_section_violations(section);
  if (!problems.empty()) throw Error(ErrorCode::kConfig, problems.front(), problems);

  Backends b;
  const auto& n = section["nli"];
  if (n["type"] == "rule") {
    b.nli = std::make_shared<RuleNliBackend>();
  } else {
    HttpBackendOptions o;
    o.endpoint = n["endpoint"].get<std::string>();
    o.model_identifier = n.value("model_identifier", std::string{"remote-nli"});
    o.api_key_env = n.value("api_key_env", std::string{});
    o.timeout_seconds = n.value("timeout_seconds", 60);
    b.nli = std::make_shared<HttpNliBackend>(o, n.value("max_premise_chars", std::size_t{2000}));
  }
  const auto& g = section["generative"];
  if (g["type"] == "rule") {
    b.generative = std::make_shared<RuleGenerativeBackend>();
  } else {
    HttpBackendOptions o;
    o.endpoint = g["endpoint"].get<std::string>();
    o.model_identifier = g.value("model_identifier", std::string{"remote-llm"});
    o.api_key_env = g.value("api_key_env", std::string{});
    o.timeout_seconds = g.value("timeout_seconds", 120);
    b.generative = std::make_shared<OpenAiChatBackend>(o, g.value("temperature", 0.0), g.value("max_tokens", 2048));
  }
  if (section.contains("replay_cache")) {
    const auto& rc = section["replay_cache"];
    auto cache = std::make_shared<ReplayCache>(resolve(base_dir, rc["path"].get<std::string>()),
                                               parse_replay_mode(rc.value("mode", std::string{"record"})));
    b.nli = with_replay(b.nli, cache);
    b.generative = with_replay(b.generative, cache);
  }
  return b;
}

}  // namespace ombudsman::cascade
