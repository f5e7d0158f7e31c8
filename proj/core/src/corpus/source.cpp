#include "ombudsman/corpus/source.hpp"

#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "ombudsman/error.hpp"

namespace ombudsman::corpus {

std::string_view to_string(SourceMode m) {
  return m == SourceMode::kKeywordSearch ? "keyword_search" : "channel_archive";
}

SourceMode parse_source_mode(std::string_view s) {
  if (s == "keyword_search") return SourceMode::kKeywordSearch;
  if (s == "channel_archive") return SourceMode::kChannelArchive;
  throw Error(ErrorCode::kConfig, "unknown source mode '" + std::string(s) + "'");
}

void SourceSpec::validate() const {
  std::vector<std::string> problems;
  if (mode == SourceMode::kKeywordSearch) {
    if (keywords.empty()) problems.push_back("keyword_search mode requires non-empty keywords");
    if (credentials_ref.empty()) problems.push_back("keyword_search mode requires credentials_ref");
  }
  if (mode == SourceMode::kChannelArchive && (!archive_path || archive_path->empty())) {
    problems.push_back("channel_archive mode requires archive_path");
  }
  if (!(rate_limit > 0)) problems.push_back("rate_limit must be > 0");
  if (page_limit && *page_limit <= 0) problems.push_back("page_limit must be positive");
  if (!problems.empty()) {
    throw Error(ErrorCode::kConfig, "invalid source '" + effective_name() + "': " + problems.front(),
                problems);
  }
}

std::string SourceSpec::effective_name() const {
  if (!name.empty()) return name;
  return std::string(to_string(platform)) + "-" + std::string(to_string(mode));
}

Partition SourceSpec::target_partition() const {
  if (partition) return *partition;
  if (platform == Platform::kReddit) return Partition::kRedditMain;
  return mode == SourceMode::kChannelArchive ? Partition::kYtPolitics : Partition::kYtTargeted;
}

void to_json(nlohmann::json& j, const SourceSpec& s) {
  j = nlohmann::json{{"name", s.effective_name()},
                     {"platform", to_string(s.platform)},
                     {"mode", to_string(s.mode)},
                     {"keywords", s.keywords},
                     {"credentials_ref", s.credentials_ref},
                     {"rate_limit", s.rate_limit}};
  if (s.page_limit) j["page_limit"] = *s.page_limit;
  if (s.archive_path) j["archive_path"] = *s.archive_path;
  if (s.endpoint) j["endpoint"] = *s.endpoint;
  if (s.partition) j["partition"] = to_string(*s.partition);
}

void from_json(const nlohmann::json& j, SourceSpec& s) {
  s.name = j.value("name", std::string{});
  s.platform = parse_platform(j.at("platform").get<std::string>());
  s.mode = parse_source_mode(j.at("mode").get<std::string>());
  s.keywords = j.value("keywords", std::vector<std::string>{});
  s.credentials_ref = j.value("credentials_ref", std::string{});
  s.rate_limit = j.value("rate_limit", 1.0);
  if (j.contains("page_limit") && !j["page_limit"].is_null()) s.page_limit = j["page_limit"].get<int>();
  if (j.contains("archive_path")) s.archive_path = j["archive_path"].get<std::string>();
  if (j.contains("endpoint")) s.endpoint = j["endpoint"].get<std::string>();
  if (j.contains("partition")) s.partition = parse_partition(j["partition"].get<std::string>());
}

namespace {

class HttplibFetcher final : public Fetcher {
 public:
  explicit HttplibFetcher(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const Headers& headers) override {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "bad url " + url);
    auto path_start = url.find('/', scheme_end + 3);
    std::string origin = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);

    auto res = client.Get(path, h);
    if (!res) {
      // Transport failures are treated like a 503 so they go through backoff.
      spdlog::warn("GET {} failed: {}", origin, httplib::to_string(res.error()));
      return HttpResponse{503, {}, std::nullopt};
    }
    HttpResponse out{res->status, res->body, std::nullopt};
    if (res->has_header("Retry-After")) {
      try {
        out.retry_after_seconds = std::stod(res->get_header_value("Retry-After"));
      } catch (const std::exception&) {
      }
    }
    return out;
  }

 private:
  std::chrono::seconds timeout_;
};

}  // namespace

std::shared_ptr<Fetcher> make_http_fetcher(std::chrono::seconds timeout) {
  return std::make_shared<HttplibFetcher>(timeout);
}

RateLimiter::RateLimiter(double requests_per_second, Sleeper sleeper, Clock clock)
    : interval_(std::chrono::nanoseconds(static_cast<long long>(1e9 / requests_per_second))),
      sleeper_(std::move(sleeper)),
      clock_(std::move(clock)) {
  if (!(requests_per_second > 0)) throw Error(ErrorCode::kConfig, "rate_limit must be > 0");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
}

void RateLimiter::acquire() {
  auto now = clock_();
  if (last_) {
    auto elapsed = now - *last_;
    if (elapsed < interval_) {
      auto wait = std::chrono::ceil<std::chrono::milliseconds>(interval_ - elapsed);
      sleeper_(wait);
      now += wait;
    }
  }
  last_ = now;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
        c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

}  // namespace ombudsman::corpus
