#include "ombudsman/corpus/ingest.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <thread>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "ombudsman/corpus/normalize.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::corpus {

void to_json(json& j, const IngestResult& r) {
  j = json{{"new_posts", r.new_posts},
           {"fetched", r.fetched},
           {"already_present", r.already_present},
           {"rejected", r.rejected},
           {"malformed", r.malformed}};
}

fs::path cursor_path_for(const fs::path& sink) {
  auto p = sink;
  p += ".cursor.json";
  return p;
}

namespace {

constexpr const char* kYoutubeBase = "https://www.googleapis.com/youtube/v3";
constexpr const char* kRedditBase = "https://oauth.reddit.com";
constexpr const char* kUserAgent = "ombudsman-ingest/0.3";

class Crawl {
 public:
  Crawl(const SourceSpec& spec, const fs::path& sink, const IngestOptions& options)
      : spec_(spec),
        sink_(sink),
        options_(options),
        sleep_(options.sleep ? options.sleep
                             : Sleeper([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); })),
        limiter_(spec.rate_limit, sleep_),
        cursor_path_(cursor_path_for(sink)) {
    if (fs::exists(sink_)) {
      for (const auto& row : read_jsonl(sink_, [](std::size_t, const std::string&) {})) {
        if (row.contains("post_id")) seen_.insert(row["post_id"].get<std::string>());
      }
    }
    if (fs::exists(cursor_path_)) all_cursors_ = read_json_file(cursor_path_);
    if (!all_cursors_.is_object()) all_cursors_ = json::object();
    cursor_ = all_cursors_.value(spec_.effective_name(), json::object());
  }

  IngestResult run_archive() {
    const auto& path = *spec_.archive_path;
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::kIo, "cannot open archive " + path);
    std::string line;
    std::size_t lineno = 0;
    std::vector<RawRecord> batch;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        batch.push_back(raw_record_from_json(json::parse(line), spec_.platform));
      } catch (const std::exception& ex) {
        ++result_.malformed;
        spdlog::warn("{}:{}: skipping malformed archive record: {}", path, lineno, ex.what());
      }
      if (batch.size() >= 1000) {
        emit(batch);
        batch.clear();
      }
    }
    emit(batch);
    return result_;
  }

  IngestResult run_search(const std::string& credential) {
    credential_ = credential;
    if (auto b = cursor_.find("backoff"); b != cursor_.end()) {
      auto delay = std::chrono::milliseconds(b->value("next_delay_ms", 0LL));
      spdlog::info("resuming {} after persisted backoff of {} ms", spec_.effective_name(), delay.count());
      if (delay.count() > 0) sleep_(delay);
      cursor_.erase("backoff");
    }
    std::size_t first_kw = cursor_.value("keyword_index", std::size_t{0});
    for (std::size_t k = first_kw; k < spec_.keywords.size(); ++k) {
      bool resuming = k == first_kw;
      std::string token = resuming ? cursor_.value("search_token", std::string{}) : std::string{};
      std::size_t skip = resuming ? cursor_.value("container_index", std::size_t{0}) : 0;
      int pages = 0;
      for (;;) {
        cursor_["keyword_index"] = k;
        cursor_["search_token"] = token;
        auto page = spec_.platform == Platform::kYoutube ? youtube_search_page(spec_.keywords[k], token, skip)
                                                         : reddit_search_page(spec_.keywords[k], token, skip);
        skip = 0;
        ++pages;
        if (!page || page->empty()) break;
        if (spec_.page_limit && pages >= *spec_.page_limit) break;
        token = *page;
      }
      cursor_["keyword_index"] = k + 1;
      cursor_["search_token"] = "";
      cursor_["container_index"] = 0;
      persist();
    }
    all_cursors_.erase(spec_.effective_name());
    write_json_file(cursor_path_, all_cursors_);
    return result_;
  }

 private:
  // Returns the next-page token ("" when exhausted, nullopt on a malformed page).
  std::optional<std::string> youtube_search_page(const std::string& keyword, const std::string& token,
                                                 std::size_t skip) {
    std::string url = base(kYoutubeBase) + "/search?part=snippet&type=video&maxResults=50&q=" +
                      url_encode(keyword) + "&key=" + url_encode(credential_);
    if (!token.empty()) url += "&pageToken=" + url_encode(token);
    auto page = get_json(url, {});
    if (!page || !page->contains("items") || !(*page)["items"].is_array()) return std::nullopt;
    const auto& items = (*page)["items"];
    for (std::size_t i = skip; i < items.size(); ++i) {
      try {
        const auto& item = items[i];
        std::string video_id = item.at("id").at("videoId").get<std::string>();
        const auto& snippet = item.at("snippet");
        youtube_comments(video_id, snippet.value("title", std::string{}),
                         snippet.value("description", std::string{}));
      } catch (const json::exception& ex) {
        ++result_.malformed;
        spdlog::warn("skipping malformed search item: {}", ex.what());
      }
      cursor_["container_index"] = i + 1;
      persist();
    }
    cursor_["container_index"] = 0;
    return page->value("nextPageToken", std::string{});
  }

  void youtube_comments(const std::string& video_id, const std::string& title, const std::string& description) {
    std::string token;
    int pages = 0;
    do {
      std::string url = base(kYoutubeBase) +
                        "/commentThreads?part=snippet&maxResults=100&textFormat=plainText&videoId=" +
                        url_encode(video_id) + "&key=" + url_encode(credential_);
      if (!token.empty()) url += "&pageToken=" + url_encode(token);
      auto page = get_json(url, {});
      if (!page) return;
      std::vector<RawRecord> batch;
      for (const auto& item : page->value("items", json::array())) {
        try {
          const auto& s = item.at("snippet").at("topLevelComment").at("snippet");
          RawRecord r;
          r.platform = Platform::kYoutube;
          r.id = item.at("id").get<std::string>();
          r.container_id = video_id;
          r.container_title = title;
          r.container_description = description;
          r.body = s.contains("textOriginal") ? s["textOriginal"].get<std::string>()
                                              : s.at("textDisplay").get<std::string>();
          r.created_at = s.at("publishedAt").get<std::string>();
          if (s.contains("authorChannelId") && s["authorChannelId"].contains("value")) {
            r.author = s["authorChannelId"]["value"].get<std::string>();
          } else {
            r.author = s.value("authorDisplayName", std::string{});
          }
          batch.push_back(std::move(r));
        } catch (const json::exception& ex) {
          ++result_.malformed;
          spdlog::warn("skipping malformed comment on {}: {}", video_id, ex.what());
        }
      }
      emit(batch);
      token = page->value("nextPageToken", std::string{});
      ++pages;
    } while (!token.empty() && (!spec_.page_limit || pages < *spec_.page_limit));
  }

  std::optional<std::string> reddit_search_page(const std::string& keyword, const std::string& after,
                                                std::size_t skip) {
    std::string url = base(kRedditBase) + "/search?type=link&sort=new&limit=100&q=" + url_encode(keyword);
    if (!after.empty()) url += "&after=" + url_encode(after);
    auto page = get_json(url, reddit_headers());
    if (!page || !page->contains("data")) return std::nullopt;
    const auto& children = (*page)["data"].value("children", json::array());
    for (std::size_t i = skip; i < children.size(); ++i) {
      try {
        const auto& d = children[i].at("data");
        RawRecord sub;
        sub.platform = Platform::kReddit;
        sub.id = d.at("name").get<std::string>();
        sub.container_id = d.at("subreddit").get<std::string>();
        sub.container_title = d.value("title", std::string{});
        std::string selftext = d.value("selftext", std::string{});
        sub.body = selftext.empty() ? *sub.container_title : *sub.container_title + "\n\n" + selftext;
        sub.created_at = d.at("created_utc").dump();
        sub.author = d.value("author", std::string{});
        emit({sub});
        reddit_comments(d.at("id").get<std::string>(), sub.container_id, *sub.container_title);
      } catch (const json::exception& ex) {
        ++result_.malformed;
        spdlog::warn("skipping malformed submission: {}", ex.what());
      }
      cursor_["container_index"] = i + 1;
      persist();
    }
    cursor_["container_index"] = 0;
    const auto& next = (*page)["data"].value("after", json());
    return next.is_string() ? next.get<std::string>() : std::string{};
  }

  void reddit_comments(const std::string& submission_id, const std::string& subreddit, const std::string& title) {
    auto page = get_json(base(kRedditBase) + "/comments/" + url_encode(submission_id) + "?limit=500",
                         reddit_headers());
    if (!page || !page->is_array() || page->size() < 2) return;
    std::vector<RawRecord> batch;
    walk_reddit_listing((*page)[1], subreddit, title, batch);
    emit(batch);
  }

  void walk_reddit_listing(const json& listing, const std::string& subreddit, const std::string& title,
                           std::vector<RawRecord>& out) {
    if (!listing.is_object() || !listing.contains("data")) return;
    for (const auto& child : listing["data"].value("children", json::array())) {
      if (child.value("kind", std::string{}) != "t1") continue;
      try {
        const auto& d = child.at("data");
        RawRecord r;
        r.platform = Platform::kReddit;
        r.id = d.at("name").get<std::string>();
        r.container_id = subreddit;
        r.container_title = title;
        r.body = d.at("body").get<std::string>();
        r.created_at = d.at("created_utc").dump();
        r.author = d.value("author", std::string{});
        out.push_back(std::move(r));
        if (d.contains("replies")) walk_reddit_listing(d["replies"], subreddit, title, out);
      } catch (const json::exception& ex) {
        ++result_.malformed;
        spdlog::warn("skipping malformed reddit comment: {}", ex.what());
      }
    }
  }

  Headers reddit_headers() const {
    return {{"Authorization", "bearer " + credential_}, {"User-Agent", kUserAgent}};
  }

  std::string base(const char* fallback) const {
    std::string b = spec_.endpoint.value_or(fallback);
    while (!b.empty() && b.back() == '/') b.pop_back();
    return b;
  }

  static bool is_rate_limited(const HttpResponse& r) {
    if (r.status == 429 || r.status >= 500) return true;
    return r.status == 403 && (r.body.find("quotaExceeded") != std::string::npos ||
                               r.body.find("rateLimitExceeded") != std::string::npos);
  }

  std::optional<json> get_json(const std::string& url, const Headers& headers) {
    auto delay = options_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      limiter_.acquire();
      HttpResponse res = fetcher().get(url, headers);
      if (res.status == 200) {
        try {
          return json::parse(res.body);
        } catch (const json::exception& ex) {
          ++result_.malformed;
          spdlog::warn("skipping malformed payload from {}: {}", redact(url), ex.what());
          return std::nullopt;
        }
      }
      if (!is_rate_limited(res)) {
        throw Error(ErrorCode::kBackend,
                    "HTTP " + std::to_string(res.status) + " from " + redact(url));
      }
      auto wait = res.retry_after_seconds
                      ? std::chrono::milliseconds(static_cast<long long>(*res.retry_after_seconds * 1000))
                      : delay;
      wait = std::min(wait, options_.max_backoff);
      if (attempt >= options_.max_retries) {
        cursor_["backoff"] = {{"attempts", attempt + 1},
                              {"next_delay_ms", std::min(delay * 2, options_.max_backoff).count()},
                              {"last_status", res.status}};
        persist();
        throw Error(ErrorCode::kRetriable,
                    "rate limit persisted after " + std::to_string(attempt + 1) + " attempts; cursor saved to " +
                        cursor_path_.string());
      }
      spdlog::info("HTTP {} from {}; backing off {} ms", res.status, redact(url), wait.count());
      sleep_(wait);
      delay = std::min(delay * 2, options_.max_backoff);
    }
  }

  std::string redact(const std::string& url) const {
    if (credential_.empty()) return url;
    std::string out = url;
    auto enc = url_encode(credential_);
    for (auto pos = out.find(enc); pos != std::string::npos; pos = out.find(enc, pos)) {
      out.replace(pos, enc.size(), "***");
    }
    return out;
  }

  Fetcher& fetcher() {
    if (!options_.fetcher) owned_fetcher_ = owned_fetcher_ ? owned_fetcher_ : make_http_fetcher();
    return options_.fetcher ? *options_.fetcher : *owned_fetcher_;
  }

  void emit(const std::vector<RawRecord>& batch) {
    std::vector<json> fresh;
    for (const auto& raw : batch) {
      ++result_.fetched;
      auto normalized = normalize(raw, spec_.target_partition(), options_.author_salt);
      if (auto* rej = std::get_if<Rejection>(&normalized)) {
        ++result_.rejected;
        spdlog::debug("rejected {}: {}", rej->record_id, to_string(rej->reason));
        continue;
      }
      auto& post = std::get<Post>(normalized);
      if (!seen_.insert(post.post_id).second) {
        ++result_.already_present;
        continue;
      }
      fresh.emplace_back(post);
    }
    if (!fresh.empty()) append_jsonl(sink_, fresh);
    result_.new_posts += fresh.size();
  }

  void persist() {
    all_cursors_[spec_.effective_name()] = cursor_;
    write_json_file(cursor_path_, all_cursors_);
  }

  const SourceSpec& spec_;
  fs::path sink_;
  const IngestOptions& options_;
  Sleeper sleep_;
  RateLimiter limiter_;
  fs::path cursor_path_;
  json all_cursors_ = json::object();
  json cursor_ = json::object();
  std::unordered_set<std::string> seen_;
  std::string credential_;
  std::shared_ptr<Fetcher> owned_fetcher_;
  IngestResult result_;
};

}  // namespace

IngestResult ingest(const SourceSpec& spec, const fs::path& sink, const IngestOptions& options) {
  spec.validate();
  std::optional<std::string> credential;
  if (!spec.credentials_ref.empty()) {
    if (options.env) {
      credential = options.env(spec.credentials_ref);
    } else if (const char* v = std::getenv(spec.credentials_ref.c_str())) {
      credential = v;
    }
    if (!credential || credential->empty()) {
      throw Error(ErrorCode::kConfig,
                  "credential environment variable '" + spec.credentials_ref + "' is not set",
                  {spec.credentials_ref});
    }
  }

  Crawl crawl(spec, sink, options);
  IngestResult result = spec.mode == SourceMode::kChannelArchive ? crawl.run_archive()
                                                                  : crawl.run_search(*credential);
  spdlog::info("ingest {}: {} new of {} fetched ({} rejected, {} malformed)", spec.effective_name(),
               result.new_posts, result.fetched, result.rejected, result.malformed);
  return result;
}

}  // namespace ombudsman::corpus
