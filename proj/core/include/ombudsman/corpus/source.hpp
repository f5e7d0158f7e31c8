#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/post.hpp"

namespace ombudsman::corpus {

enum class SourceMode { kKeywordSearch, kChannelArchive };

std::string_view to_string(SourceMode m);
SourceMode parse_source_mode(std::string_view s);

struct SourceSpec {
  std::string name;  // cursor key; defaults to "<platform>-<mode>"
  Platform platform = Platform::kYoutube;
  SourceMode mode = SourceMode::kKeywordSearch;
  std::vector<std::string> keywords;
  std::string credentials_ref;  // environment variable holding the API key / token
  double rate_limit = 1.0;      // requests per second
  std::optional<int> page_limit;
  std::optional<std::string> archive_path;  // channel_archive: local JSONL dump
  std::optional<std::string> endpoint;      // API base URL override
  std::optional<Partition> partition;       // override of the mode's default partition

  // Throws Error(kConfig) listing every violated constraint.
  void validate() const;
  std::string effective_name() const;
  Partition target_partition() const;
};

void to_json(nlohmann::json& j, const SourceSpec& s);
void from_json(const nlohmann::json& j, SourceSpec& s);

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
  std::optional<double> retry_after_seconds;
};

// Blocking HTTP GET; the seam used to test platform clients offline.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual HttpResponse get(const std::string& url, const Headers& headers) = 0;
};

std::shared_ptr<Fetcher> make_http_fetcher(std::chrono::seconds timeout = std::chrono::seconds(30));

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// Spaces calls at least 1/rps apart.
class RateLimiter {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  RateLimiter(double requests_per_second, Sleeper sleeper, Clock clock = {});

  void acquire();

 private:
  std::chrono::nanoseconds interval_;
  Sleeper sleeper_;
  Clock clock_;
  std::optional<std::chrono::steady_clock::time_point> last_;
};

std::string url_encode(std::string_view s);

}  // namespace ombudsman::corpus
