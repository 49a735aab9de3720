#pragma once

#include <string>
#include <variant>
#include <vector>

namespace betacov::cli {

using Cell = std::variant<long, double, bool, std::string>;

/// 12 significant digits, "-0" folded to "0".
std::string format_real(double x);
std::string format_cell(const Cell& cell);

/// In-memory CSV with a fixed header. Rendering is LF-terminated, no quoting
/// (cells never contain separators).
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns);

    void add_row(std::vector<Cell> cells);
    const std::vector<std::string>& columns() const noexcept { return columns_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    const std::vector<Cell>& row(std::size_t i) const { return rows_.at(i); }
    std::string render() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

} // namespace betacov::cli
