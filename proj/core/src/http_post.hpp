#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ombudsman::detail {

struct PostResult {
  int status = 0;
  std::string body;
};

// POSTs a JSON body to an absolute URL. Transport failures throw
// Error(kRetriable); HTTP statuses are returned to the caller.
PostResult post_json(const std::string& url, const std::string& body,
                     const std::vector<std::pair<std::string, std::string>>& headers, int timeout_seconds);

// 429 and 5xx become Error(kRetriable); other non-2xx become Error(kBackend).
void check_status(const PostResult& r, const std::string& what);

}  // namespace ombudsman::detail
