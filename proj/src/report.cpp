#include "es/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace es::report {

using nlohmann::json;

namespace {

// Nonnegative signed values are stored as u64 so that parsing gives back the
// same alternative.
Cell normalize(Cell c) {
    if (const auto* v = std::get_if<std::int64_t>(&c); v && *v >= 0) return static_cast<u64>(*v);
    return c;
}

json cell_to_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return nullptr;
            } else if constexpr (std::is_same_v<T, double>) {
                if (std::isfinite(v)) return v;
                return format_real(v);  // JSON has no inf or nan
            } else {
                return v;
            }
        },
        c);
}

std::optional<double> non_finite(const std::string& s) {
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan" || s == "-nan") return std::nan("");
    return std::nullopt;
}

Cell cell_from_json(const json& j) {
    switch (j.type()) {
        case json::value_t::null: return std::monostate{};
        case json::value_t::number_unsigned: return j.get<u64>();
        case json::value_t::number_integer: return normalize(j.get<std::int64_t>());
        case json::value_t::number_float: return j.get<double>();
        case json::value_t::string: {
            const auto s = j.get<std::string>();
            if (auto v = non_finite(s)) return *v;
            return s;
        }
        default: throw DomainError("report: unexpected JSON value " + j.dump());
    }
}

json named_to_json(const std::vector<NamedCell>& cells) {
    json out = json::object();
    for (const auto& c : cells) out[c.name] = cell_to_json(c.value);
    return out;
}

// nlohmann objects are key-sorted; order is restored from the companion key list.
std::vector<NamedCell> named_from_json(const json& obj, const json& order) {
    std::vector<NamedCell> out;
    for (const auto& k : order) {
        const auto name = k.get<std::string>();
        out.push_back({name, cell_from_json(obj.at(name))});
    }
    return out;
}

json names_of(const std::vector<NamedCell>& cells) {
    json out = json::array();
    for (const auto& c : cells) out.push_back(c.name);
    return out;
}

template <class T>
bool parse_whole(std::string_view s, T& v) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::optional<Cell> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    u64 u = 0;
    if (parse_whole(s, u)) return u;
    std::int64_t i = 0;
    if (parse_whole(s, i)) return normalize(i);
    if (auto v = non_finite(s)) return *v;
    double d = 0;
    if (s.find_first_of(".eE") != std::string::npos && parse_whole(s, d)) return d;
    return std::nullopt;
}

std::string csv_field(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return "";
            } else if constexpr (std::is_same_v<T, double>) {
                return format_real(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
                const bool quote = v.empty() || parse_number(v) || v.find_first_of(",\"\r\n") != std::string::npos;
                if (!quote) return v;
                std::string out = "\"";
                for (char ch : v) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                return out + '"';
            } else {
                return std::to_string(v);
            }
        },
        c);
}

std::string human_field(const Cell& c) {
    if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
    if (std::holds_alternative<double>(c)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", std::get<double>(c));
        return buf;
    }
    return csv_field(c);
}

// Splits CSV text into records of (field, was_quoted).
std::vector<std::vector<std::pair<std::string, bool>>> split_csv(const std::string& text) {
    std::vector<std::vector<std::pair<std::string, bool>>> records;
    std::vector<std::pair<std::string, bool>> rec;
    std::string field;
    bool quoted = false, in_quotes = false, any = false;
    auto end_field = [&] {
        rec.emplace_back(field, quoted);
        field.clear();
        quoted = false;
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        any = true;
        if (in_quotes) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            in_quotes = quoted = true;
        } else if (ch == ',') {
            end_field();
        } else if (ch == '\n') {
            end_field();
            records.push_back(std::move(rec));
            rec.clear();
            any = false;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (in_quotes) throw DomainError("report: unterminated quote in CSV");
    if (any) {
        end_field();
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace

std::size_t SumReport::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw DomainError("report " + label + " has no column " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

const Cell& SumReport::at(std::size_t row, const std::string& name) const { return rows.at(row).at(column(name)); }

const Cell& SumReport::summary_value(const std::string& name) const {
    for (const auto& c : summary) {
        if (c.name == name) return c.value;
    }
    throw DomainError("report " + label + " has no summary value " + name);
}

void SumReport::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw DomainError("report row width does not match the header");
    for (auto& c : row) c = normalize(std::move(c));
    rows.push_back(std::move(row));
}

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

double as_real(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* u = std::get_if<u64>(&c)) return static_cast<double>(*u);
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw DomainError("report: cell is not numeric");
}

u64 as_u64(const Cell& c) {
    if (const auto* u = std::get_if<u64>(&c)) return *u;
    throw DomainError("report: cell is not a nonnegative integer");
}

void validate(const SumReport& r) {
    for (const auto& row : r.rows) {
        if (row.size() != r.columns.size()) throw InvariantViolation("report " + r.label + ": ragged row");
    }
    auto numeric = [](const Cell& c) {
        return std::holds_alternative<u64>(c) || std::holds_alternative<std::int64_t>(c) ||
               std::holds_alternative<double>(c);
    };
    for (const auto& rc : r.ratios) {
        auto col = [&](const std::string& name) {
            const auto it = std::find(r.columns.begin(), r.columns.end(), name);
            if (it == r.columns.end()) {
                throw InvariantViolation("report " + r.label + ": ratio " + rc.ratio + " refers to missing column " +
                                         name);
            }
            return static_cast<std::size_t>(it - r.columns.begin());
        };
        const std::size_t ci = col(rc.ratio), si = col(rc.sum), ei = col(rc.envelope);
        for (const auto& row : r.rows) {
            if (std::holds_alternative<std::monostate>(row[ci])) continue;
            if (!numeric(row[si]) || !numeric(row[ei])) {
                throw InvariantViolation("report " + r.label + ": ratio " + rc.ratio + " without both operands");
            }
        }
    }
}

std::string to_json(const SumReport& r) {
    json j;
    j["label"] = r.label;
    j["version"] = r.version;
    j["timestamp"] = r.timestamp;
    j["parameters"] = named_to_json(r.parameters);
    j["parameter_order"] = names_of(r.parameters);
    j["summary"] = named_to_json(r.summary);
    j["summary_order"] = names_of(r.summary);
    j["columns"] = r.columns;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = json::array();
        for (const auto& c : row) jr.push_back(cell_to_json(c));
        rows.push_back(std::move(jr));
    }
    j["rows"] = std::move(rows);
    json ratios = json::array();
    for (const auto& rc : r.ratios) ratios.push_back({{"ratio", rc.ratio}, {"sum", rc.sum}, {"envelope", rc.envelope}});
    j["ratios"] = std::move(ratios);
    return j.dump(2) + "\n";
}

SumReport from_json(const std::string& text) {
    const json j = json::parse(text);
    SumReport r;
    r.label = j.at("label").get<std::string>();
    r.version = j.at("version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.parameters = named_from_json(j.at("parameters"), j.at("parameter_order"));
    r.summary = named_from_json(j.at("summary"), j.at("summary_order"));
    r.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& jr : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : jr) row.push_back(cell_from_json(c));
        r.rows.push_back(std::move(row));
    }
    for (const auto& rc : j.at("ratios")) {
        r.ratios.push_back({rc.at("ratio").get<std::string>(), rc.at("sum").get<std::string>(),
                            rc.at("envelope").get<std::string>()});
    }
    return r;
}

std::string to_csv(const SumReport& r) {
    std::string out;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_field(r.columns[i]);
    }
    out += '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_field(row[i]);
        }
        out += '\n';
    }
    return out;
}

SumReport from_csv(const std::string& text) {
    const auto records = split_csv(text);
    if (records.empty()) throw DomainError("report: CSV has no header");
    SumReport r;
    for (const auto& [name, quoted] : records[0]) r.columns.push_back(name);
    for (std::size_t k = 1; k < records.size(); ++k) {
        if (records[k].size() != r.columns.size()) throw DomainError("report: CSV row width does not match the header");
        std::vector<Cell> row;
        for (const auto& [field, quoted] : records[k]) {
            if (quoted) {
                row.emplace_back(field);
            } else if (field.empty()) {
                row.emplace_back(std::monostate{});
            } else if (auto num = parse_number(field)) {
                row.push_back(*num);
            } else {
                row.emplace_back(field);
            }
        }
        r.rows.push_back(std::move(row));
    }
    return r;
}

std::string to_human(const SumReport& r) {
    std::ostringstream os;
    os << r.label << " (schema " << r.version << ")\n";
    for (const auto& p : r.parameters) os << "  " << p.name << " = " << human_field(p.value) << "\n";
    for (const auto& s : r.summary) os << s.name << ": " << human_field(s.value) << "\n";
    if (r.columns.empty()) return os.str();
    std::vector<std::size_t> width(r.columns.size());
    for (std::size_t i = 0; i < r.columns.size(); ++i) width[i] = r.columns[i].size();
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], human_field(row[i]).size());
    }
    auto line = [&](auto field_of) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) {
            const std::string f = field_of(i);
            os << (i ? "  " : "") << std::string(width[i] - f.size(), ' ') << f;
        }
        os << "\n";
    };
    line([&](std::size_t i) { return r.columns[i]; });
    for (const auto& row : r.rows) line([&](std::size_t i) { return human_field(row[i]); });
    return os.str();
}

}  // namespace es::report
