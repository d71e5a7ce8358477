#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace svolterra::csv {

/// Shortest-safe 17-significant-digit representation; stable across runs.
std::string format(double value);

/// Joins already formatted fields with commas.
std::string join(const std::vector<std::string>& fields);

/// Rows of a comma-separated file, split into trimmed fields. Empty lines
/// are skipped.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path);
std::vector<std::vector<std::string>> read_rows(std::istream& in);

/// Strict numeric parse of one field; throws ConfigError naming `what`.
double parse_double(std::string_view field, std::string_view what);

}  // namespace svolterra::csv
