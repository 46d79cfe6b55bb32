#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace reform {

struct Cell {
    /// Empty when the statistic is unavailable (written as NA).
    std::optional<double> value;
    bool significant = false;
    /// Set whenever a test was run; a flagged cell always carries it.
    std::optional<double> p_value;
    std::optional<std::size_t> population;
    std::string note;

    auto operator==(const Cell&) const -> bool = default;
};

/// Labeled grid of aggregated statistics. Figure series are tables too: one
/// row per x value.
class ReportTable {
  public:
    /// File stem used when the table is written out.
    std::string name;
    std::string title;
    std::vector<std::string> footnotes;

    ReportTable() = default;
    ReportTable(std::string name, std::string title, std::vector<std::string> rows, std::vector<std::string> columns);

    [[nodiscard]] auto rows() const -> const std::vector<std::string>& { return rows_; }
    [[nodiscard]] auto columns() const -> const std::vector<std::string>& { return columns_; }
    void add_row(std::string label);
    [[nodiscard]] auto has_row(std::string_view label) const -> bool;

    /// Throws std::out_of_range for unknown labels.
    [[nodiscard]] auto at(std::string_view row, std::string_view column) -> Cell&;
    [[nodiscard]] auto at(std::string_view row, std::string_view column) const -> const Cell&;
    [[nodiscard]] auto value(std::string_view row, std::string_view column) const -> std::optional<double>;

    auto operator==(const ReportTable&) const -> bool = default;

  private:
    [[nodiscard]] auto index(std::string_view row, std::string_view column) const -> std::size_t;

    std::vector<std::string> rows_;
    std::vector<std::string> columns_;
    std::vector<Cell> cells_;
};

/// Context written ahead of every table so outputs identify their inputs.
struct ReportHeader {
    std::string provenance;
    std::string normalization;
    std::vector<std::pair<std::string, std::string>> config;
};

/// Shortest round-trip decimal form of `x`.
[[nodiscard]] auto format_number(double x) -> std::string;

/// Long-format CSV: `#` header lines, then `row,column,value,significant,p_value,population,note`.
[[nodiscard]] auto to_csv(const ReportTable& table, const ReportHeader& header) -> std::string;
/// Inverse of to_csv for the table part (header lines other than the table
/// name and footnotes are ignored).
[[nodiscard]] auto parse_csv(std::string_view text) -> ReportTable;

/// Markdown rendering; significant cells in bold, unavailable cells as NA.
[[nodiscard]] auto to_markdown(const ReportTable& table, const ReportHeader& header, int precision = 4) -> std::string;

}  // namespace reform
