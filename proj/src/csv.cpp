#include "jch/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace jch {

std::string csv_format(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", value);
    return buf;
}

void write_csv(const std::filesystem::path& path, const CsvSchema& schema,
               const std::vector<CsvRow>& rows) {
    if (schema.columns.empty()) throw ConfigError("CSV schema needs at least one column");
    std::ostringstream out;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        if (c) out << ',';
        out << schema.columns[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != schema.columns.size())
            throw ConfigError("CSV row width does not match the schema");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ',';
            if (const double* d = std::get_if<double>(&row[c]))
                out << csv_format(*d);
            else
                out << std::get<std::string>(row[c]);
        }
        out << '\n';
    }

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
        f << out.str();
        if (!f.good()) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to '" + path.string() + "' failed: " + ec.message());
}

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    throw IoError("CSV column '" + name + "' not found");
}

double CsvTable::number(std::size_t row, int col) const {
    return std::stod(rows.at(row).at(col));
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    const int c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) out.push_back(number(r, c));
    return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    bool header = true;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (header) {
            table.columns = cells;
            header = false;
        } else {
            table.rows.push_back(cells);
        }
    }
    if (table.columns.empty()) throw IoError("CSV '" + path.string() + "' has no header");
    return table;
}

}  // namespace jch
