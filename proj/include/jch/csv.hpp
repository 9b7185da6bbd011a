#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "jch/errors.hpp"

namespace jch {

using CsvCell = std::variant<double, std::string>;
using CsvRow = std::vector<CsvCell>;

struct CsvSchema {
    std::vector<std::string> columns;
};

/// Format a double the way the CSV writer does: 10 significant digits.
std::string csv_format(double value);

/// Write header + rows, numbers at 10 significant digits, atomically
/// (write to a temporary file in the same directory, then rename).
void write_csv(const std::filesystem::path& path, const CsvSchema& schema,
               const std::vector<CsvRow>& rows);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;
    double number(std::size_t row, int col) const;
    std::vector<double> column_values(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace jch
