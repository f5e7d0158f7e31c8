#include "ombudsman/jsonl.hpp"

#include <fstream>
#include <iterator>

#include "ombudsman/error.hpp"

namespace fs = std::filesystem;

namespace ombudsman {

namespace {

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::kIo, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
}

}  // namespace

std::vector<json> read_jsonl(const fs::path& path,
                             const std::function<void(std::size_t, const std::string&)>& on_bad_line) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& ex) {
      if (!on_bad_line) {
        throw Error(ErrorCode::kParse,
                    path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
      }
      on_bad_line(lineno, ex.what());
    }
  }
  return rows;
}

void write_jsonl(const fs::path& path, const std::vector<json>& rows) {
  std::string content;
  for (const auto& row : rows) {
    content += row.dump();
    content += '\n';
  }
  write_text_file(path, content);
}

void append_jsonl(const fs::path& path, const std::vector<json>& rows) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path.string());
  for (const auto& row : rows) {
    out << row.dump() << '\n';
    out.flush();
  }
}

json read_json_file(const fs::path& path) {
  auto content = read_text_file(path);
  try {
    return json::parse(content);
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kParse, path.string() + ": " + ex.what());
  }
}

void write_json_file(const fs::path& path, const json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

void write_text_file(const fs::path& path, const std::string& content) {
  ensure_parent(path);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot rename onto " + path.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace ombudsman
