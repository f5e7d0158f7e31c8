#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::cascade {

enum class BackendKind { kNli, kGenerative };

std::string_view to_string(BackendKind k);

class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;
  virtual BackendKind kind() const = 0;
  virtual std::string model_identifier() const = 0;
};

struct NliScores {
  double entailment = 0;
  double contradiction = 0;
  double neutral = 0;
};

// A well-formed triple lies in [0,1] and sums to 1 within 1e-6.
bool is_valid(const NliScores& s);

class NliBackend : public InferenceBackend {
 public:
  BackendKind kind() const final { return BackendKind::kNli; }
  // Throws Error(kBackend) or Error(kRetriable) on failure.
  virtual NliScores infer(std::string_view premise, std::string_view hypothesis) = 0;
  // Premises longer than this many code points are truncated before inference.
  virtual std::size_t max_premise_chars() const { return 2000; }
};

class GenerativeBackend : public InferenceBackend {
 public:
  BackendKind kind() const final { return BackendKind::kGenerative; }
  virtual std::string generate(std::string_view prompt) = 0;
};

// Request-hash -> response store, persisted as JSONL. Reads are concurrent;
// writes are serialized and appended immediately.
class ReplayCache {
 public:
  enum class Mode { kRecord, kReplay, kOff };

  ReplayCache(std::filesystem::path path, Mode mode);

  Mode mode() const { return mode_; }
  std::optional<nlohmann::json> lookup(const std::string& key) const;
  void store(const std::string& key, const nlohmann::json& meta, const nlohmann::json& response);
  std::size_t size() const;

  static std::string request_key(BackendKind kind, std::string_view model, std::string_view request);

 private:
  std::filesystem::path path_;
  Mode mode_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, nlohmann::json> entries_;
};

ReplayCache::Mode parse_replay_mode(std::string_view s);

// Decorators consulting the cache before the wrapped backend. In kReplay mode
// a miss throws Error(kNotFound) instead of calling through.
std::shared_ptr<NliBackend> with_replay(std::shared_ptr<NliBackend> inner, std::shared_ptr<ReplayCache> cache);
std::shared_ptr<GenerativeBackend> with_replay(std::shared_ptr<GenerativeBackend> inner,
                                               std::shared_ptr<ReplayCache> cache);

struct Backends {
  std::shared_ptr<NliBackend> nli;
  std::shared_ptr<GenerativeBackend> generative;
};

// Builds backends from the "backends" config section:
//   {"nli": {"type": "rule"|"http", ...}, "generative": {"type": "rule"|"openai", ...},
//    "replay_cache": {"path": ..., "mode": "record"|"replay"|"off"}}
Backends make_backends(const nlohmann::json& section, const std::filesystem::path& base_dir = {});

// Violations of the backends section, for config validation.
std::vector<std::string> backend_section_violations(const nlohmann::json& section);

}  // namespace ombudsman::cascade
