#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace bhtlab {

// 17 significant digits, '.' decimal point, independent of the global locale.
std::string format_double(double v);

using CsvCell = std::variant<std::int64_t, double, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }

    // Throws when the cell count differs from the header.
    void add_row(std::vector<CsvCell> cells);

    std::string str() const;
    // Writes through a temporary file and renames it into place.
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace bhtlab
