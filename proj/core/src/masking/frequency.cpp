#include "ombudsman/masking/frequency.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gazetteer_data.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/text.hpp"

namespace ombudsman::masking {

const std::vector<std::string>& default_location_stoplist() {
  static const std::vector<std::string> kStoplist = [] {
    std::vector<std::string> out(std::begin(gazetteer::kStates), std::end(gazetteer::kStates));
    out.emplace_back("United States");
    out.emplace_back("USA");
    return out;
  }();
  return kStoplist;
}

std::vector<std::string> load_stoplist(const std::filesystem::path& path) {
  std::vector<std::string> out;
  auto content = read_text_file(path);
  std::size_t start = 0;
  while (start <= content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    auto line = text::collapse_whitespace(std::string_view(content).substr(start, end - start));
    if (!line.empty() && line.front() != '#') out.push_back(line);
    start = end + 1;
  }
  return out;
}

FrequencyTable location_frequency(const std::vector<std::vector<std::string>>& surfaces_per_post,
                                  const std::vector<std::string>& stoplist, FrequencyMode mode) {
  std::set<std::string> stop;
  for (const auto& s : stoplist) stop.insert(text::casefold(text::collapse_whitespace(s)));

  std::map<std::string, std::size_t> counts;
  for (const auto& post : surfaces_per_post) {
    std::set<std::string> in_post;
    for (const auto& surface : post) {
      auto key = text::casefold(text::collapse_whitespace(surface));
      if (key.empty() || stop.contains(key)) continue;
      if (mode == FrequencyMode::kPosts && !in_post.insert(key).second) continue;
      ++counts[key];
    }
  }
  FrequencyTable table(counts.begin(), counts.end());
  std::stable_sort(table.begin(), table.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return table;
}

std::string frequency_csv(const FrequencyTable& table) {
  std::string out = "location,count\n";
  for (const auto& [loc, n] : table) {
    bool quote = loc.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      out.push_back('"');
      for (char c : loc) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
      }
      out.push_back('"');
    } else {
      out += loc;
    }
    out += "," + std::to_string(n) + "\n";
  }
  return out;
}

}  // namespace ombudsman::masking
