#pragma once

#include <string>

namespace hxd {

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Whole file as a string; throws std::runtime_error when it cannot be read.
std::string read_file(const std::string& path);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace hxd
