#pragma once

// Column table feeding both the CSV file and the JSON "series" object, so the
// CSV header and the JSON series keys cannot drift apart.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pinchfl::cli {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit Table(std::vector<std::string> cols) : columns(std::move(cols)) {}
    void add(std::vector<Cell> row);
};

// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

void write_csv(std::ostream& os, const Table& t);

// {column: [values...]}; non-finite numbers become null.
nlohmann::ordered_json series_json(const Table& t);

}  // namespace pinchfl::cli
