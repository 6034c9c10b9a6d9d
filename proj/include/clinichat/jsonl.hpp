#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace clinichat::jsonl {

using json = nlohmann::json;

std::vector<json> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<json>& rows);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// FNV-1a digest of a file's bytes, as 16 hex chars. Used in run manifests.
std::string file_digest(const std::string& path);

}  // namespace clinichat::jsonl
