#include "betacov_cli/csv.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace betacov::cli {

std::string format_real(double x) {
    if (x == 0.0) return "0";
    return fmt::format("{:.12g}", x);
}

std::string format_cell(const Cell& cell) {
    struct Visitor {
        std::string operator()(long v) const { return fmt::format("{}", v); }
        std::string operator()(double v) const { return format_real(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(Visitor{}, cell);
}

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw std::logic_error("CsvTable: empty header");
}

void CsvTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns_.size()) {
        throw std::logic_error(fmt::format("CsvTable: row has {} cells, header has {}", cells.size(), columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string CsvTable::render() const {
    std::string out;
    auto append_line = [&out](const auto& items, auto&& to_text) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += to_text(items[i]);
        }
        out.push_back('\n');
    };
    append_line(columns_, [](const std::string& s) { return s; });
    for (const auto& r : rows_) append_line(r, [](const Cell& c) { return format_cell(c); });
    return out;
}

} // namespace betacov::cli
