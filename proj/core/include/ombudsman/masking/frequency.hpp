#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ombudsman::masking {

// 50 US state names plus "United States" and "USA".
const std::vector<std::string>& default_location_stoplist();

// One entry per line; blank lines and '#' comments ignored.
std::vector<std::string> load_stoplist(const std::filesystem::path& path);

enum class FrequencyMode { kOccurrences, kPosts };

using FrequencyTable = std::vector<std::pair<std::string, std::size_t>>;

// Casefolded surface counts with stoplisted surfaces removed, ordered by
// descending count then alphabetically. `surfaces_per_post` holds each
// positive example's extracted surfaces. kPosts counts a surface at most
// once per post.
FrequencyTable location_frequency(const std::vector<std::vector<std::string>>& surfaces_per_post,
                                  const std::vector<std::string>& stoplist,
                                  FrequencyMode mode = FrequencyMode::kOccurrences);

std::string frequency_csv(const FrequencyTable& table);

}  // namespace ombudsman::masking
