#include <doctest.h>

#include <cmath>

#include "es/meanvalue.hpp"
#include "oracles.hpp"

using namespace es;
using namespace es::meanvalue;

TEST_CASE("prime sums match the naive per-prime oracle") {
    u64 f1 = 0, f2 = 0;
    for (u64 p = 2; p < 200; ++p) {
        if (!oracle::is_prime(p)) continue;
        const auto [a, b] = oracle::type_counts(p);
        f1 += a;
        f2 += b;
    }
    const PrimeSums s = prime_sums(200);
    CHECK(s.sum_f1 == f1);
    CHECK(s.sum_f2 == f2);
    CHECK(s.prime_count == 46);

    const auto [f1_2, f2_2] = oracle::type_counts(2);
    const auto [f1_3, f2_3] = oracle::type_counts(3);
    CHECK(sum_f1(6) == f1_2 + f1_3 + 6);
    CHECK(sum_f2(3) == f2_2);
    CHECK(sum_f2(4) == f2_2 + f2_3);
}

TEST_CASE("prime sums do not depend on the worker count") {
    const PrimeSums one = prime_sums(3000, 1);
    CHECK(prime_sums(3000, 3) == one);
    CHECK(prime_sums(3000, 8) == one);
    CHECK(one.min_f > 0);
    CHECK_THROWS_AS(prime_sums(2), DomainError);
    CHECK_THROWS_AS(prime_sums(100, 0), ConfigError);
}

TEST_CASE("prime sums report injected invariant failures") {
    const SplitFn zero = [](u64 p, const arith::ArithTables& t) {
        auto s = solutions::type_split(p, t);
        if (p == 97) s = {p, 0, 0, 0};
        return s;
    };
    CHECK_THROWS_AS(prime_sums(200, 1, zero), InvariantViolation);
    const SplitFn other = [](u64 p, const arith::ArithTables& t) {
        auto s = solutions::type_split(p, t);
        if (p == 11) s.other = 1;
        return s;
    };
    CHECK_THROWS_AS(prime_sums(200, 2, other), InvariantViolation);
}

TEST_CASE("mean value report envelopes and ratios") {
    const MeanValueReport r = mean_value_report(1000);
    const double x = 1000, lx = std::log(x), llx = std::log(lx);
    CHECK(r.envelope("x_log2") == doctest::Approx(x * lx * lx));
    CHECK(r.envelope("x_log5_loglog2") == doctest::Approx(x * std::pow(lx, 5) * llx * llx));
    CHECK(r.ratio("f1_main") == doctest::Approx(r.sums.sum_f1 / (x * std::pow(lx, 5) * llx * llx)));
    CHECK(r.ratio("f2_upper") == doctest::Approx(r.sums.sum_f2 / (x * lx * lx * llx)));
    for (const auto& q : r.ratios) CHECK(q.value > 0);
}

namespace {

long double oracle_weight_sum(u64 x) {
    long double s = 0;
    for (u64 a = 1; a <= x; ++a) {
        for (u64 l = 1; a * l <= x; ++l) {
            const long double d = oracle::divisor_count(4 * l * a * a + 1);
            const long double ph = oracle::phi(4 * a * l);
            s += x * d / (ph * std::log1p(static_cast<long double>(x) / (a * l)));
        }
    }
    return s;
}

}  // namespace

TEST_CASE("weight sum: small blocks") {
    const WeightSumReport r = weight_sum(16);
    const WeightBlock* corner = nullptr;
    const WeightBlock* first = nullptr;
    for (const auto& b : r.blocks) {
        if (b.i == -1 && b.j == -1) corner = &b;
        if (b.i == 0 && b.j == 0) first = &b;
    }
    REQUIRE(corner != nullptr);
    CHECK(corner->pairs == 1);
    CHECK(corner->block_sum == doctest::Approx(16.0 * 2 / (2 * std::log(17.0))));
    REQUIRE(first != nullptr);
    CHECK(first->pairs == 1);  // (a, l) = (2, 2)
    CHECK(first->divisor_sum == oracle::divisor_count(33));
    CHECK_THROWS_AS(weight_sum(15), DomainError);
}

TEST_CASE("weight sum: direct value against the double-loop oracle") {
    const u64 x = 1000;
    const WeightSumReport r = weight_sum(x);
    const long double want = oracle_weight_sum(x);
    CHECK(std::fabs(r.direct_value - want) / want < 1e-6);
    CHECK(std::fabs(r.dyadic_value - r.direct_value) / r.direct_value < 1e-9);
    u64 pairs = 0;
    for (u64 a = 1; a <= x; ++a) pairs += x / a;
    CHECK(r.pairs == pairs);
    for (const auto& b : r.blocks) {
        CHECK(b.weight == doctest::Approx(1.0 / (1.0 + std::log2(1000.0) - b.i - b.j)));
        CHECK(b.weight > 0);
    }
    CHECK(r.majorant_value > 0);
}

TEST_CASE("weight sum is identical for every worker count") {
    const WeightSumReport a = weight_sum(3000, 1);
    const WeightSumReport b = weight_sum(3000, 4);
    CHECK(a.direct_value == b.direct_value);
    CHECK(a.dyadic_value == b.dyadic_value);
    CHECK(a.majorant_value == b.majorant_value);
    CHECK(a.blocks.size() == b.blocks.size());
}

TEST_CASE("final chain lines are monotone") {
    for (u64 x : {u64{16}, u64{1000}, u64{1} << 10, u64{1} << 20, u64{123456789}}) {
        const FinalChain c = final_chain(x);
        for (int k = 0; k < 3; ++k) {
            INFO("x = " << x << ", line " << k);
            CHECK(c.lines[k] <= c.lines[k + 1]);
            CHECK(c.ratios[k] >= 1.0);
        }
    }
    // K integral: the double sum is exactly the harmonic line.
    const FinalChain c10 = final_chain(u64{1} << 10);
    CHECK(c10.lines[0] == c10.lines[1]);
    long double h = 0;
    for (int i = 0; i <= 10; ++i) {
        for (int k = 1; k <= 11 - i; ++k) h += 1.0L / k;
    }
    CHECK(c10.lines[1] == doctest::Approx(static_cast<double>(h)));
    CHECK(c10.lines[3] == doctest::Approx(11 * std::log2(12.0)));
    CHECK(final_chain(1000).lines[0] < final_chain(1000).lines[1]);
    CHECK_THROWS_AS(final_chain(15), DomainError);
}

TEST_CASE("harmonic numbers stay below log2(m + 1)") {
    double h = 0;
    for (int m = 1; m <= 1000000; ++m) {
        h += 1.0 / m;
        REQUIRE(h <= std::log2(m + 1.0));
    }
}
