#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "es/report.hpp"

using namespace es;
using namespace es::report;

namespace {

SumReport sample() {
    SumReport r;
    r.label = "sample";
    r.timestamp = "2026-01-02T03:04:05Z";
    r.parameters = {{"x", u64{1000}}, {"theta", 0.25}, {"which", std::string("case2tail")}};
    r.summary = {{"total", std::numeric_limits<u64>::max()}, {"offset", std::int64_t{-7}}};
    r.columns = {"name", "i", "sum", "envelope", "ratio"};
    r.ratios = {{"ratio", "sum", "envelope"}};
    r.add_row({std::string("plain"), std::int64_t{-1}, u64{18446744073709551557ull}, 1.0 / 3, 3.0});
    r.add_row({std::string("a,b \"quoted\""), std::int64_t{4}, u64{0}, 1e300, 0.1});
    r.add_row({std::string("123"), std::int64_t{0}, u64{7}, 2.5e-310, Cell{}});
    r.add_row({std::string(""), std::int64_t{-9007199254740993}, u64{1} << 53, -0.0, 4.0 / 7});
    return r;
}

}  // namespace

TEST_CASE("reals are printed with 17 significant digits and a decimal point") {
    CHECK(format_real(3.0) == "3.0");
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(1e300) == "1.0000000000000001e+300");
    CHECK(format_real(-2.0) == "-2.0");
    for (double v : {1.0 / 3, M_PI, 1e-320, 123456789.125, 6.02214076e23}) {
        CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("JSON round-trips every field exactly") {
    const SumReport r = sample();
    const SumReport back = from_json(to_json(r));
    CHECK(back == r);
    CHECK(std::get<u64>(back.summary_value("total")) == std::numeric_limits<u64>::max());
    CHECK(as_u64(back.at(0, "sum")) == 18446744073709551557ull);
    CHECK(to_json(back) == to_json(r));
}

TEST_CASE("CSV round-trips header and rows exactly") {
    const SumReport r = sample();
    const std::string csv = to_csv(r);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.substr(0, csv.find('\n')) == "name,i,sum,envelope,ratio");
    CHECK(csv.back() == '\n');
    const SumReport back = from_csv(csv);
    CHECK(back.columns == r.columns);
    CHECK(back.rows == r.rows);
    CHECK(std::get<std::string>(back.at(2, "name")) == "123");
    CHECK(std::get<std::string>(back.at(3, "name")).empty());
    CHECK(std::holds_alternative<std::monostate>(back.at(2, "ratio")));
    CHECK(std::get<double>(back.at(0, "ratio")) == 3.0);
    CHECK(to_csv(back) == csv);
}

TEST_CASE("CSV of an empty table is just the header") {
    SumReport r;
    r.columns = {"x", "y"};
    CHECK(to_csv(r) == "x,y\n");
    CHECK(from_csv("x,y\n").rows.empty());
}

TEST_CASE("non-finite reals survive both formats") {
    SumReport r;
    r.columns = {"v"};
    r.add_row({HUGE_VAL});
    r.add_row({-HUGE_VAL});
    CHECK(from_json(to_json(r)) == r);
    CHECK(from_csv(to_csv(r)).rows == r.rows);
}

TEST_CASE("nonnegative signed cells are stored unsigned") {
    SumReport r;
    r.columns = {"v"};
    r.add_row({std::int64_t{5}});
    CHECK(std::holds_alternative<u64>(r.rows[0][0]));
    CHECK_THROWS_AS(r.add_row({u64{1}, u64{2}}), DomainError);
}

TEST_CASE("ratio columns need both operands") {
    SumReport r = sample();
    CHECK_NOTHROW(validate(r));
    r.rows[1][2] = Cell{};
    CHECK_THROWS_AS(validate(r), InvariantViolation);
    r = sample();
    r.ratios.push_back({"ratio", "sum", "missing"});
    CHECK_THROWS_AS(validate(r), InvariantViolation);
    r = sample();
    r.rows[0][3] = std::string("text");
    CHECK_THROWS_AS(validate(r), InvariantViolation);
}

TEST_CASE("human output carries the label, summary and every row") {
    const std::string h = to_human(sample());
    CHECK(h.find("sample") != std::string::npos);
    CHECK(h.find("total: 18446744073709551615") != std::string::npos);
    CHECK(h.find("a,b \"quoted\"") != std::string::npos);
}
