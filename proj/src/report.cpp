#include "report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace subdiff::cli {

void ReportTable::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("report row width does not match the header");
    rows.push_back(std::move(cells));
}

std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string cell_raw(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<double>(c)) return format_double(std::get<double>(c));
    if (std::holds_alternative<long>(c)) return std::to_string(std::get<long>(c));
    return std::get<bool>(c) ? "true" : "false";
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string cell_json(const Cell& c) {
    if (std::holds_alternative<std::string>(c))
        return "\"" + json_escape(std::get<std::string>(c)) + "\"";
    return cell_raw(c);
}

}  // namespace

std::string to_csv(const ReportTable& table) {
    std::string out = "# schema_version=" + std::to_string(kSchemaVersion) + "\n";
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        if (j) out += ',';
        out += table.columns[j];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += cell_raw(row[j]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const ReportTable& table) {
    std::string out = "{\"schema_version\":" + std::to_string(kSchemaVersion) + ",\"rows\":[";
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (i) out += ',';
        out += '{';
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) out += ',';
            out += "\"" + json_escape(table.columns[j]) + "\":" + cell_json(table.rows[i][j]);
        }
        out += '}';
    }
    out += "]}\n";
    return out;
}

std::string render(const ReportTable& table, const std::string& format) {
    if (format == "csv") return to_csv(table);
    if (format == "json") return to_json(table);
    throw std::invalid_argument("unknown report format: " + format);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace subdiff::cli
