#pragma once
#include <string>
#include <variant>
#include <vector>

namespace ethd::csv {

using Cell = std::variant<std::string, double, long long>;

// Minimal CSV table: header row plus value rows. Numbers are rendered with
// std::to_chars (shortest round-trip form), so output is locale-independent
// and stable across runs.
class Table {
public:
    explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row);
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<Cell>>& rows() const { return rows_; }

    std::string to_csv() const;
    std::string to_json() const; // array of objects keyed by header
    void write(const std::string& path, bool as_json = false) const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double v);

struct Parsed {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Parsed read(const std::string& path);
double to_double(const std::string& field); // throws IoError on garbage

} // namespace ethd::csv
