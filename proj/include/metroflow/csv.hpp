#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace metroflow {

// Header-first comma-separated table. Fields are unquoted; blank lines are skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name, or -1.
    [[nodiscard]] int column(std::string_view name) const;
    // Names from `required` that the header lacks.
    [[nodiscard]] std::vector<std::string> missing_columns(const std::vector<std::string>& required) const;
};

[[nodiscard]] CsvTable read_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv_file(const std::string& path);

// Strict numeric parse of a field; throws ConfigError naming the row and column.
[[nodiscard]] double parse_double(std::string_view field, std::size_t row, std::string_view column);
[[nodiscard]] long long parse_int(std::string_view field, std::size_t row, std::string_view column);

// Shortest round-trippable decimal text for a double.
[[nodiscard]] std::string format_double(double v);

}  // namespace metroflow
