#pragma once

#include <map>
#include <string>

namespace horseshoe {

// Writes via a temp file + rename so partial artifacts never appear.
void write_file_atomic(const std::string& path, const std::string& content);

std::map<std::string, std::string> parse_kv_file(const std::string& path);
std::string read_file(const std::string& path);

}  // namespace horseshoe
