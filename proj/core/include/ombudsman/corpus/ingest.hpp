#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/source.hpp"

namespace ombudsman::corpus {

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

struct IngestOptions {
  std::string author_salt;
  std::shared_ptr<Fetcher> fetcher;  // defaults to real HTTP
  Sleeper sleep;                     // defaults to std::this_thread::sleep_for
  EnvLookup env;                     // defaults to std::getenv
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{1000};
  std::chrono::milliseconds max_backoff{std::chrono::minutes(10)};
};

struct IngestResult {
  std::size_t new_posts = 0;
  std::size_t fetched = 0;
  std::size_t already_present = 0;
  std::size_t rejected = 0;
  std::size_t malformed = 0;
};

void to_json(nlohmann::json& j, const IngestResult& r);

// Crawl cursor persisted beside the sink so an interrupted crawl resumes.
std::filesystem::path cursor_path_for(const std::filesystem::path& sink);

// Fetches posts for one source and appends the normalized, previously unseen
// ones to `sink`. Idempotent: existing post ids are never rewritten.
//
// Errors: missing credentials -> Error(kConfig); rate limiting that outlasts
// the retry budget -> Error(kRetriable) after the cursor (with backoff
// state) is persisted. Malformed items and pages are logged and skipped.
IngestResult ingest(const SourceSpec& spec, const std::filesystem::path& sink,
                    const IngestOptions& options = {});

}  // namespace ombudsman::corpus
