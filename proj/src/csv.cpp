#include "ethd/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ethd/errors.hpp"

namespace ethd::csv {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string cell_to_string(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    return std::to_string(std::get<long long>(c));
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default: out += ch;
        }
    }
    return out;
}

} // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size())
        throw DomainError("csv row width " + std::to_string(row.size()) +
                          " does not match header width " + std::to_string(header_.size()));
    rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) os << ',';
        os << header_[i];
    }
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << cell_to_string(row[i]);
        }
        os << '\n';
    }
    return os.str();
}

std::string Table::to_json() const {
    std::ostringstream os;
    os << "[\n";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        os << "  {";
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i) os << ", ";
            os << '"' << json_escape(header_[i]) << "\": ";
            const Cell& c = rows_[r][i];
            if (std::holds_alternative<std::string>(c))
                os << '"' << json_escape(std::get<std::string>(c)) << '"';
            else
                os << cell_to_string(c);
        }
        os << '}' << (r + 1 < rows_.size() ? "," : "") << '\n';
    }
    os << "]\n";
    return os.str();
}

void Table::write(const std::string& path, bool as_json) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << (as_json ? to_json() : to_csv());
    if (!f) throw IoError("write failed: " + path);
}

Parsed read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    Parsed out;
    std::string line;
    bool first = true;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t pos = 0;
        while (true) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(pos));
                break;
            }
            fields.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (first) {
            out.header = std::move(fields);
            first = false;
        } else {
            out.rows.push_back(std::move(fields));
        }
    }
    if (first) throw IoError("empty csv file: " + path);
    return out;
}

double to_double(const std::string& field) {
    double v = 0.0;
    auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size())
        throw IoError("not a number: '" + field + "'");
    return v;
}

} // namespace ethd::csv
