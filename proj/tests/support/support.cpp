#include "support.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <sys/wait.h>
#include <unistd.h>

#include <spdlog/spdlog.h>

namespace fs = std::filesystem;

namespace ombudsman::test {

namespace {
// Library progress logs drown test output; errors still print.
const bool kQuietLogs = [] {
  spdlog::set_level(spdlog::level::err);
  return true;
}();
}  // namespace

fs::path data_dir() { return OMBUDSMAN_TEST_DATA_DIR; }
fs::path fixtures_dir() { return data_dir() / "fixtures"; }
fs::path cli_path() { return OMBUDSMAN_TEST_CLI; }

TempDir::TempDir(std::string_view tag) {
  static std::uint64_t counter = 0;
  auto base = fs::temp_directory_path();
  for (;;) {
    path_ = base / ("ombudsman-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    if (fs::create_directories(path_)) break;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string flip_case(std::string_view s, Gen& g) {
  std::string out(s);
  for (auto& c : out) {
    if (!g.chance(0.5)) continue;
    auto u = static_cast<unsigned char>(c);
    c = static_cast<char>(std::isupper(u) ? std::tolower(u) : std::toupper(u));
  }
  return out;
}

namespace {

const std::vector<std::string> kCities = {"Pittsburgh", "Cincinnati", "Lowell", "Toledo",  "Duluth",
                                          "Scranton",   "Akron",      "Spokane", "Boise",  "Tacoma"};
const std::vector<std::string> kInfra = {"bridge", "overpass", "tunnel",  "railway", "derailed", "cracked",
                                         "crumbling", "rusted", "injured", "collapsing", "unsafe", "dangerous",
                                         "worried", "failing"};
const std::vector<std::string> kFuture = {"will", "gonna", "soon", "going to", "about to", "waiting to happen",
                                          "is next", "won't"};
const std::vector<std::string> kFiller = {"the", "road", "near", "my", "house", "looks", "bad", "again",
                                          "today", "people", "say", "it", "and", "honestly", "nobody", "cares",
                                          "weather", "game", "lol", "county"};
const std::vector<std::string> kKeywords = {"train derailment", "infrastructure", "infrastructure collapse",
                                            "Ohio train derailment", "Pittsburgh bridge collapse",
                                            "Fern Hollow Bridge Collapse", "I-85 Overpass collapse"};
const std::vector<std::string> kTitles = {"Evening news", "Pittsburgh bridge collapse coverage",
                                          "Infrastructure hearing", "Weekly roundup"};

}  // namespace

std::vector<corpus::Post> generate_posts(std::size_t n, std::uint64_t seed) {
  Gen g(seed);
  std::vector<corpus::Post> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string text;
    auto add = [&](const std::string& w) {
      if (!text.empty()) text += ' ';
      text += w;
    };
    std::size_t words = g.range(3, 14);
    for (std::size_t w = 0; w < words; ++w) {
      auto r = g.below(100);
      if (r < 40) add(g.pick(kFiller));
      else if (r < 65) add(g.pick(kInfra));
      else if (r < 75) add(g.pick(kFuture));
      else if (r < 85) add(g.pick(kCities));
      else add(flip_case(g.pick(kKeywords), g));
    }
    if (g.chance(0.02)) add("#mock-nli-error");
    if (g.chance(0.02)) add("#mock-omit");
    auto platform = g.chance(0.5) ? corpus::Platform::kReddit : corpus::Platform::kYoutube;
    auto partition = corpus::Partition::kRedditMain;
    if (platform == corpus::Platform::kYoutube) {
      partition = g.chance(0.5) ? corpus::Partition::kYtPolitics : corpus::Partition::kYtTargeted;
    }
    auto post = make_post((platform == corpus::Platform::kReddit ? "rd:g" : "yt:g") + std::to_string(i), text,
                          partition, platform);
    if (platform == corpus::Platform::kYoutube) {
      post.container_title = g.pick(kTitles);
      if (g.chance(0.3)) post.container_description = "an infrastructure explainer";
    }
    out.push_back(std::move(post));
  }
  return out;
}

std::string generate_masking_text(Gen& g) {
  static const std::vector<std::string> kPlaces = {
      "Lowell", "Massachusetts", "Ohio", "Lake Erie", "Merrimack River", "Cincinnati", "Pennsylvania",
      "New York", "Texas", "Chicago", "Mississippi River", "Maryland"};
  static const std::vector<std::string> kWords = {
      "the",   "bridge", "in",   "over", "is",  "rusted", "café",   "naïve", "🚧", "straße",
      "road,", "and",    "near", "was",  "big", "<LOCATION>", "(see", "map)", "…",  "again!"};
  std::string text;
  std::size_t words = g.range(1, 25);
  for (std::size_t w = 0; w < words; ++w) {
    if (!text.empty()) text += g.chance(0.1) ? "  " : " ";
    if (g.chance(0.25)) {
      text += g.pick(kPlaces);
      if (g.chance(0.3)) text += " " + g.pick(kPlaces);  // adjacent mentions
    } else {
      text += g.pick(kWords);
    }
  }
  return text;
}

corpus::Post make_post(std::string id, std::string text, corpus::Partition partition, corpus::Platform platform) {
  corpus::Post p;
  p.post_id = std::move(id);
  p.platform = platform;
  p.partition = partition;
  p.container_id = "c";
  p.created_at = UtcSeconds{std::chrono::seconds{1700000000}};
  p.text = std::move(text);
  return p;
}

std::string run_command(const std::string& command, int& exit_code) {
  std::string output;
  FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
  if (pipe == nullptr) {
    exit_code = -1;
    return output;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), n);
  int status = ::pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return output;
}

}  // namespace ombudsman::test
