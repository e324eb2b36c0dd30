#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace canonscreen::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a UTF-8 CSV file with a header row. Double-quoted fields may contain
/// commas and doubled quotes; CRLF line endings are accepted.
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote, or newline.
std::string escape(std::string_view field);

/// Shortest decimal with 17 significant digits, round-trip exact.
std::string format_double(double value);

/// Parses a full field as a double; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& out);

}  // namespace canonscreen::csv
