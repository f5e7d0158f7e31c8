#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman {

using nlohmann::json;

// Reads one JSON value per non-empty line. Malformed lines throw
// Error(kParse) naming the line number unless `on_bad_line` is given, in
// which case it is called and the line is skipped.
std::vector<json> read_jsonl(const std::filesystem::path& path,
                             const std::function<void(std::size_t, const std::string&)>& on_bad_line = {});

// Writes via a temporary file and rename, so readers never see a torn file.
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

// Appends rows; each line is flushed whole.
void append_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& value);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ombudsman
