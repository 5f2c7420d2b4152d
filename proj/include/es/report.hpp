#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "es/common.hpp"

namespace es::report {

// Empty cells (monostate) are written as null in JSON and as an empty CSV field.
using Cell = std::variant<std::monostate, u64, std::int64_t, double, std::string>;

struct NamedCell {
    std::string name;
    Cell value;

    friend bool operator==(const NamedCell&, const NamedCell&) = default;
};

// Declares that column `ratio` is column `sum` divided by column `envelope`.
struct RatioColumn {
    std::string ratio;
    std::string sum;
    std::string envelope;

    friend bool operator==(const RatioColumn&, const RatioColumn&) = default;
};

struct SumReport {
    std::string label;
    std::string version{kSchemaVersion};
    std::string timestamp;  // UTC, ISO 8601
    std::vector<NamedCell> parameters;
    std::vector<NamedCell> summary;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<RatioColumn> ratios;

    friend bool operator==(const SumReport&, const SumReport&) = default;

    std::size_t column(const std::string& name) const;  // throws DomainError if absent
    const Cell& at(std::size_t row, const std::string& name) const;
    const Cell& summary_value(const std::string& name) const;
    void add_row(std::vector<Cell> row);
};

std::string now_utc();

// Every declared ratio names existing columns, and every row with a ratio
// value has numeric sum and envelope cells. Throws InvariantViolation.
void validate(const SumReport& r);

// Reals are written with 17 significant digits, so both forms round-trip
// exactly. CSV holds only the header and rows.
std::string to_json(const SumReport& r);
SumReport from_json(const std::string& text);
std::string to_csv(const SumReport& r);
SumReport from_csv(const std::string& text);  // columns and rows only
std::string to_human(const SumReport& r);

std::string format_real(double v);  // %.17g, with ".0" added to integral values
double as_real(const Cell& c);      // numeric cells only; DomainError otherwise
u64 as_u64(const Cell& c);

}  // namespace es::report
