#include "http_post.hpp"

#include <httplib.h>

#include "ombudsman/error.hpp"

namespace ombudsman::detail {

PostResult post_json(const std::string& url, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers, int timeout_seconds) {
  auto scheme_end = url.find("://");
  auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string origin = url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  auto res = client.Post(path, h, body, "application/json");
  if (!res) throw Error(ErrorCode::kRetriable, origin + " unreachable: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

void check_status(const PostResult& r, const std::string& what) {
  if (r.status >= 200 && r.status < 300) return;
  auto code = (r.status == 429 || r.status >= 500) ? ErrorCode::kRetriable : ErrorCode::kBackend;
  throw Error(code, what + " returned HTTP " + std::to_string(r.status), {r.body.substr(0, 500)});
}

}  // namespace ombudsman::detail
