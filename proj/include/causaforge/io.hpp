#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace causaforge::io {

std::string read_file(const std::filesystem::path& path);
std::vector<std::string> read_lines(const std::filesystem::path& path);

// Writes to a sibling temp file then renames over `path`, so readers never
// observe a partial artifact.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

}  // namespace causaforge::io
