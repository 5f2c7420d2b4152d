#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "es/bilinear.hpp"
#include "es/cli.hpp"
#include "es/meanvalue.hpp"
#include "oracles.hpp"

using namespace es;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

u64 primes_below(u64 x) {
    u64 c = 0;
    for (u64 n = 2; n < x; ++n) c += oracle::is_prime(n);
    return c;
}

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(std::vector<std::string> args, const cli::Hooks& hooks = {}) {
    args.insert(args.begin(), "es");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err, hooks);
    return {code, out.str(), err.str()};
}

fs::path scratch(const char* name) {
    const fs::path d = fs::temp_directory_path() / ("es-cli-test-" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("solve prints canonical triples and the ordered count as JSON") {
    const auto r = invoke({"solve", "5", "--json"});
    REQUIRE(r.code == cli::kOk);
    const json j = json::parse(r.out);
    json expected = json::array();
    u64 ordered = 0;
    for (const auto& t : oracle::solutions(5)) {
        expected.push_back({t.n1, t.n2, t.n3});
        ordered += t.n1 == t.n3 ? 1 : (t.n1 == t.n2 || t.n2 == t.n3) ? 3 : 6;
    }
    CHECK(j.at("rows") == expected);
    CHECK(j.at("summary").at("ordered_count") == ordered);
    CHECK(j.at("rows") == json::parse("[[2,4,20],[2,5,10]]"));
    CHECK(j.at("summary").at("ordered_count") == 12);
    CHECK(j.at("version") == std::string(kSchemaVersion));
}

TEST_CASE("mean writes a header and one data row as CSV") {
    const auto dir = scratch("mean");
    const auto r = invoke({"mean", "--x", "100", "--csv", "-", "--cache-dir", dir.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 2);
    CHECK(r.out.find('\r') == std::string::npos);
    const auto rep = report::from_csv(r.out);
    REQUIRE(rep.rows.size() == 1);
    const auto sums = meanvalue::prime_sums(100);
    CHECK(report::as_u64(rep.at(0, "sum_f1")) == sums.sum_f1);
    CHECK(report::as_u64(rep.at(0, "sum_f2")) == sums.sum_f2);
    CHECK(report::as_u64(rep.at(0, "prime_count")) == primes_below(100));
}

TEST_CASE("bilinear human table total equals the direct sum") {
    const auto r = invoke({"bilinear", "--V", "4", "--W", "4", "--no-cache"});
    REQUIRE(r.code == cli::kOk);
    u64 direct = 0;
    for (u64 l = 5; l <= 8; ++l) {
        for (u64 a = 5; a <= 8; ++a) direct += oracle::divisor_count(4 * l * a * a + 1);
    }
    CHECK(bilinear::bilinear_divisor_sum(4, 4) == direct);
    CHECK(r.out.find("total: " + std::to_string(direct) + "\n") != std::string::npos);
}

TEST_CASE("bilinear --cases writes one CSV row per case and the whole box") {
    const auto dir = scratch("bilinear");
    const fs::path file = dir / "out.csv";
    fs::create_directories(dir);
    const auto r = invoke({"bilinear", "--V", "256", "--W", "256", "--theta", "0.25", "--cases", "--allow-degenerate",
                           "--csv", file.string(), "--cache-dir", dir.string()});
    REQUIRE(r.code == cli::kOk);
    CHECK(r.out.empty());
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto rep = report::from_csv(ss.str());
    REQUIRE(rep.rows.size() == 5);
    u64 sum = 0, pairs = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        sum += report::as_u64(rep.at(i, "sum"));
        pairs += report::as_u64(rep.at(i, "pairs"));
        const double ratio = report::as_real(rep.at(i, "sum")) / report::as_real(rep.at(i, "envelope"));
        CHECK(report::as_real(rep.at(i, "ratio")) == doctest::Approx(ratio).epsilon(1e-15));
    }
    CHECK(std::get<std::string>(rep.at(4, "case")) == "all");
    CHECK(report::as_u64(rep.at(4, "sum")) == sum);
    CHECK(pairs == 256 * 256);
    CHECK(sum == bilinear::bilinear_divisor_sum(256, 256));
}

TEST_CASE("exit codes are distinct per failure class") {
    CHECK(invoke({"frobnicate"}).code == cli::kUsage);
    CHECK(invoke({}).code == cli::kUsage);
    CHECK(invoke({"solve"}).code == cli::kUsage);
    CHECK(invoke({"mean", "--x", "100", "--workers", "0"}).code == cli::kUsage);
    CHECK(invoke({"split", "9"}).code == cli::kDomain);
    CHECK(invoke({"mean", "--x", "2", "--no-cache"}).code == cli::kConfig);
    CHECK(invoke({"bilinear", "--V", "4", "--W", "4", "--theta", "0.05", "--cases", "--no-cache"}).code == cli::kConfig);
    CHECK(invoke({"lemma", "--which", "7", "--no-cache"}).code == cli::kConfig);
    CHECK(invoke({"weightsum", "--x", "5000000000", "--no-cache"}).code == cli::kCapacity);
    CHECK(invoke({"--help"}).code == cli::kOk);
}

TEST_CASE("invariant violations exit with their reserved code") {
    cli::Hooks fake;
    fake.compute = [](const cli::RunConfig& cfg) {
        const meanvalue::SplitFn broken = [](u64 p, const arith::ArithTables& t) {
            auto s = solutions::type_split(p, t);
            if (p == 13) s.f1 = s.f2 = 0;
            return s;
        };
        meanvalue::prime_sums(cfg.x, cfg.workers, broken);
        return report::SumReport{};
    };
    const auto r = invoke({"mean", "--x", "50", "--no-cache"}, fake);
    CHECK(r.code == cli::kInvariant);
    CHECK(r.err.find("invariant violation") != std::string::npos);
    CHECK(r.out.empty());
}

TEST_CASE("version flag prints the schema version") {
    const auto r = invoke({"--version"});
    CHECK(r.code == cli::kOk);
    CHECK(r.out == std::string(kSchemaVersion) + "\n");
}

TEST_CASE("cached runs reproduce the stored report byte for byte") {
    const auto dir = scratch("hit");
    int calls = 0;
    cli::Hooks counting;
    counting.compute = [&](const cli::RunConfig& cfg) {
        ++calls;
        return cli::compute(cfg);
    };
    const std::vector<std::string> args = {"lemma", "--which", "case2tail", "--Z", "10000", "--json",
                                           "--cache-dir", dir.string()};
    const auto first = invoke(args, counting);
    REQUIRE(first.code == cli::kOk);
    const auto second = invoke(args, counting);
    CHECK(second.out == first.out);
    CHECK(calls == 1);
    auto other = args;
    other[4] = "1000000";
    CHECK(invoke(other, counting).code == cli::kOk);
    CHECK(calls == 2);

    const auto off = scratch("off");
    CHECK(invoke({"lemma", "--which", "case2tail", "--Z", "100", "--cache-dir", off.string(), "--no-cache"}).code ==
          cli::kOk);
    CHECK_FALSE(fs::exists(off));
}

TEST_CASE("every subcommand runs on a small input") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"split", "5", "--json"},
             {"weightsum", "--x", "64", "--no-cache"},
             {"lemma", "--which", "4", "--x", "1000", "--no-cache"},
             {"lemma", "--which", "5", "--x", "1000", "--no-cache"},
             {"lemma", "--which", "6", "--Z", "10000", "--r", "2", "--n-max", "10000", "--no-cache"},
             {"congruence", "--l", "2", "--n", "9", "--json"},
             {"primes", "--x", "100", "--list", "--csv"},
         }) {
        const auto r = invoke(args);
        INFO(args[0]);
        CHECK(r.code == cli::kOk);
        CHECK_FALSE(r.out.empty());
    }
    const json cong = json::parse(invoke({"congruence", "--l", "2", "--n", "9", "--json"}).out);
    CHECK(cong.at("rows")[0][2] == cong.at("summary").at("direct_count"));
    const auto primes = report::from_csv(invoke({"primes", "--x", "100", "--list", "--csv"}).out);
    CHECK(primes.rows.size() == primes_below(101));
}
