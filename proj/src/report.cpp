#include "reform/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "reform/errors.hpp"

namespace reform {

ReportTable::ReportTable(std::string name, std::string title, std::vector<std::string> rows,
                         std::vector<std::string> columns)
    : name(std::move(name)), title(std::move(title)), rows_(std::move(rows)), columns_(std::move(columns)),
      cells_(rows_.size() * columns_.size())
{
}

void ReportTable::add_row(std::string label)
{
    rows_.push_back(std::move(label));
    cells_.resize(rows_.size() * columns_.size());
}

auto ReportTable::has_row(std::string_view label) const -> bool
{
    return std::find(rows_.begin(), rows_.end(), label) != rows_.end();
}

auto ReportTable::index(std::string_view row, std::string_view column) const -> std::size_t
{
    auto r = std::find(rows_.begin(), rows_.end(), row);
    auto c = std::find(columns_.begin(), columns_.end(), column);
    if (r == rows_.end() || c == columns_.end()) {
        throw std::out_of_range("no cell (" + std::string(row) + ", " + std::string(column) + ") in table " + name);
    }
    return static_cast<std::size_t>(r - rows_.begin()) * columns_.size()
        + static_cast<std::size_t>(c - columns_.begin());
}

auto ReportTable::at(std::string_view row, std::string_view column) -> Cell&
{
    return cells_[index(row, column)];
}

auto ReportTable::at(std::string_view row, std::string_view column) const -> const Cell&
{
    return cells_[index(row, column)];
}

auto ReportTable::value(std::string_view row, std::string_view column) const -> std::optional<double>
{
    return at(row, column).value;
}

auto format_number(double x) -> std::string
{
    if (std::isnan(x)) {
        return "nan";
    }
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), end);
}

namespace {

auto csv_field(std::string_view s) -> std::string
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
        return std::string(s);
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

/// Splits one CSV record starting at `pos`; advances past its line end.
auto read_record(std::string_view text, std::size_t& pos) -> std::vector<std::string>
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    while (pos < text.size()) {
        char c = text[pos++];
        if (quoted) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    fields.back() += '"';
                    ++pos;
                } else {
                    quoted = false;
                }
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c == '\n') {
            break;
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    return fields;
}

auto parse_double(const std::string& s) -> double
{
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError("bad number '" + s + "' in report CSV");
    }
    return x;
}

auto md_escape(std::string_view s) -> std::string
{
    std::string out;
    for (char c : s) {
        if (c == '|') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

auto one_line(std::string_view s) -> std::string
{
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    return out;
}

}  // namespace

auto to_csv(const ReportTable& table, const ReportHeader& header) -> std::string
{
    std::string out;
    out += "# table: " + table.name + "\n";
    out += "# title: " + one_line(table.title) + "\n";
    out += "# provenance: " + one_line(header.provenance) + "\n";
    out += "# normalization: " + header.normalization + "\n";
    for (const auto& [key, value] : header.config) {
        out += "# config: " + key + "=" + one_line(value) + "\n";
    }
    for (const auto& note : table.footnotes) {
        out += "# footnote: " + one_line(note) + "\n";
    }
    out += "row,column,value,significant,p_value,population,note\n";
    for (const auto& row : table.rows()) {
        for (const auto& column : table.columns()) {
            const auto& cell = table.at(row, column);
            out += csv_field(row) + "," + csv_field(column) + ",";
            out += cell.value ? format_number(*cell.value) : "NA";
            out += cell.significant ? ",1," : ",0,";
            out += cell.p_value ? format_number(*cell.p_value) : "";
            out += ",";
            out += cell.population ? std::to_string(*cell.population) : "";
            out += "," + csv_field(cell.note) + "\n";
        }
    }
    return out;
}

auto parse_csv(std::string_view text) -> ReportTable
{
    std::string name;
    std::string title;
    std::vector<std::string> footnotes;
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::pair<std::pair<std::string, std::string>, Cell>> cells;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < text.size()) {
        if (!header_seen && text[pos] == '#') {
            auto end = text.find('\n', pos);
            auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
            pos = end == std::string_view::npos ? text.size() : end + 1;
            auto take = [&](std::string_view prefix) -> std::optional<std::string> {
                if (line.substr(0, prefix.size()) == prefix) {
                    return std::string(line.substr(prefix.size()));
                }
                return std::nullopt;
            };
            if (auto v = take("# table: ")) {
                name = *v;
            } else if (auto t = take("# title: ")) {
                title = *t;
            } else if (auto f = take("# footnote: ")) {
                footnotes.push_back(*f);
            }
            continue;
        }
        auto fields = read_record(text, pos);
        if (!header_seen) {
            if (fields.size() != 7 || fields[0] != "row") {
                throw ParseError("report CSV lacks its column header");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() == 1 && fields[0].empty()) {
            continue;
        }
        if (fields.size() != 7) {
            throw ParseError("report CSV record has " + std::to_string(fields.size()) + " fields");
        }
        Cell cell;
        if (fields[2] != "NA") {
            cell.value = parse_double(fields[2]);
        }
        cell.significant = fields[3] == "1";
        if (!fields[4].empty()) {
            cell.p_value = parse_double(fields[4]);
        }
        if (!fields[5].empty()) {
            cell.population = static_cast<std::size_t>(std::stoull(fields[5]));
        }
        cell.note = fields[6];
        if (std::find(rows.begin(), rows.end(), fields[0]) == rows.end()) {
            rows.push_back(fields[0]);
        }
        if (std::find(columns.begin(), columns.end(), fields[1]) == columns.end()) {
            columns.push_back(fields[1]);
        }
        cells.push_back({{fields[0], fields[1]}, std::move(cell)});
    }
    if (!header_seen) {
        throw ParseError("report CSV lacks its column header");
    }
    ReportTable table(name, title, rows, columns);
    table.footnotes = std::move(footnotes);
    for (auto& [key, cell] : cells) {
        table.at(key.first, key.second) = std::move(cell);
    }
    return table;
}

auto to_markdown(const ReportTable& table, const ReportHeader& header, int precision) -> std::string
{
    std::string out = "## " + table.title + "\n\n";
    out += "- provenance: " + one_line(header.provenance) + "\n";
    out += "- normalization: `" + header.normalization + "`\n";
    for (const auto& [key, value] : header.config) {
        out += "- " + key + ": `" + one_line(value) + "`\n";
    }
    out += "\n|";
    for (const auto& column : table.columns()) {
        out += " | " + md_escape(column);
    }
    out += " |\n|---";
    for (std::size_t i = 0; i < table.columns().size(); ++i) {
        out += "|---:";
    }
    out += "|\n";
    for (const auto& row : table.rows()) {
        out += "| " + md_escape(row);
        for (const auto& column : table.columns()) {
            const auto& cell = table.at(row, column);
            std::string text = "NA";
            if (cell.value) {
                std::array<char, 64> buf{};
                std::snprintf(buf.data(), buf.size(), "%.*f", precision, *cell.value);
                text = buf.data();
            }
            if (cell.significant) {
                text = "**" + text + "**";
            }
            if (!cell.note.empty()) {
                text += " " + md_escape(cell.note);
            }
            out += " | " + text;
        }
        out += " |\n";
    }
    if (!table.footnotes.empty()) {
        out += "\n";
        for (const auto& note : table.footnotes) {
            out += "> " + one_line(note) + "\n";
        }
    }
    return out;
}

}  // namespace reform
