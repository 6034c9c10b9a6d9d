#include "clinichat/jsonl.hpp"

#include <fstream>
#include <sstream>

#include "clinichat/errors.hpp"
#include "clinichat/text.hpp"

namespace clinichat::jsonl {

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::config_error, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config_error, "cannot write file: " + path);
  out << content;
}

std::vector<json> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot open file: " + path);
  std::vector<json> rows;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    try {
      rows.push_back(json::parse(trimmed));
    } catch (const json::exception& e) {
      throw Error(ErrorKind::config_error,
                  path + ":" + std::to_string(lineno) + ": invalid JSON line: " + e.what());
    }
  }
  return rows;
}

void write_file(const std::string& path, const std::vector<json>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::config_error, "cannot write file: " + path);
  for (const auto& row : rows) out << row.dump() << '\n';
}

std::string file_digest(const std::string& path) {
  return text::fnv1a64_hex(read_text_file(path));
}

}  // namespace clinichat::jsonl
