#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace laac {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Strict full-string parse; throws ParameterError on trailing garbage.
double parse_double(std::string_view text);

/// Writes through a temporary file and renames it into place. Throws IoError.
void write_file_atomic(const std::filesystem::path &path, std::string_view content);
std::string read_file(const std::filesystem::path &path);

std::vector<std::string> split(std::string_view line, char sep);

/// Reads a CSV with a header row. Throws IoError/ParameterError.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path &path);

} // namespace laac
