#include "pinchfl/cli/table.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "pinchfl/errors.hpp"

namespace pinchfl::cli {

void Table::add(std::vector<Cell> row) {
    detail::require(row.size() == columns.size(), "row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    return csv_field(std::get<std::string>(c));
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << csv_field(t.columns[j]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << cell_text(row[j]);
        os << '\n';
    }
}

nlohmann::ordered_json series_json(const Table& t) {
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
        nlohmann::ordered_json col = nlohmann::ordered_json::array();
        for (const auto& row : t.rows) {
            const Cell& c = row[j];
            if (const auto* d = std::get_if<double>(&c))
                col.push_back(std::isfinite(*d) ? nlohmann::ordered_json(*d) : nlohmann::ordered_json(nullptr));
            else if (const auto* i = std::get_if<std::int64_t>(&c))
                col.push_back(*i);
            else
                col.push_back(std::get<std::string>(c));
        }
        s[t.columns[j]] = std::move(col);
    }
    return s;
}

}  // namespace pinchfl::cli
