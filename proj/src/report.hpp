#pragma once

#include <string>
#include <variant>
#include <vector>

namespace subdiff::cli {

inline constexpr int kSchemaVersion = 1;

using Cell = std::variant<std::string, double, long, bool>;

struct ReportTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> cells);
};

// 17 significant digits, round-trips doubles exactly
std::string format_double(double v);

// leading "# schema_version=N" comment, then header and rows
std::string to_csv(const ReportTable& table);

// {"schema_version":N,"rows":[...]} with the same cells as the CSV
std::string to_json(const ReportTable& table);

std::string render(const ReportTable& table, const std::string& format);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace subdiff::cli
