#pragma once

#include <string>

namespace csgeo {

/// Shortest decimal string that round-trips to the same double (up to 17
/// significant digits, '.' separator, "nan"/"inf" spelled out).
std::string format_double(double x);

/// Reads a whole file; throws ConfigError if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes (replaces) a whole file; throws ConfigError on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace csgeo
