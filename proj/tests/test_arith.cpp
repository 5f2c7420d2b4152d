#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "es/arith.hpp"
#include "es/primality.hpp"
#include "oracles.hpp"

using namespace es;
using namespace es::arith;

TEST_CASE("sieve tables on small limits") {
    const auto t = sieve_tables(10);
    CHECK(t.least_prime_factor(9) == 3);
    CHECK(t.divisor_count(9) == 3);
    CHECK(t.divisor_count(6) == 4);
    CHECK(t.primes().size() == 4);
    CHECK_THROWS_AS(sieve_tables(1), DomainError);
    CHECK_THROWS_AS(sieve_tables(1000000, false, 1024), CapacityError);
}

TEST_CASE("sieve tables agree with brute force up to 10^5") {
    const auto t = sieve_tables(100000, true);
    for (u64 n = 2; n <= 100000; ++n) {
        REQUIRE(t.divisor_count(n) == oracle::divisor_count(n));
        const u64 p = t.least_prime_factor(n);
        REQUIRE(n % p == 0);
        REQUIRE(oracle::is_prime(p));
        REQUIRE(divisor_count(factorize(n)) == oracle::divisor_count(n));
    }
    for (u64 n = 1; n <= 3000; ++n) REQUIRE(t.phi(n) == oracle::phi(n));
}

TEST_CASE("divisor count of 720720") {
    const auto t = sieve_tables(1000000);
    CHECK(t.divisor_count(720720) == 240);
    CHECK(oracle::divisor_count(720720) == 240);
}

TEST_CASE("factorize") {
    CHECK(factorize(1).factors.empty());
    CHECK(factorize(145).factors == std::vector<PrimePower>{{5, 1}, {29, 1}});
    CHECK(factorize(625).factors == std::vector<PrimePower>{{5, 4}});
    CHECK_THROWS_AS(factorize(0), DomainError);

    std::mt19937_64 rng(11);
    const auto t = sieve_tables(1 << 16);
    for (int k = 0; k < 300; ++k) {
        const u64 n = (rng() >> 34) + 1;
        const auto f = factorize(n);
        const auto g = oracle::factor(n);
        REQUIRE(f.factors.size() == g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            REQUIRE(f.factors[i].prime == g[i].first);
            REQUIRE(f.factors[i].exponent == g[i].second);
        }
        if (n <= t.limit()) REQUIRE(factorize(n, t) == f);
    }
    // Wide inputs: the product of the reported powers must give back n.
    for (int k = 0; k < 100; ++k) {
        const u128 n = static_cast<u128>(rng()) * ((rng() >> 38) + 1);
        const auto f = factorize(n);
        u128 prod = 1;
        u128 prev = 1;
        for (const auto& pp : f.factors) {
            REQUIRE(pp.prime > prev);
            REQUIRE(is_prime(pp.prime));
            for (unsigned e = 0; e < pp.exponent; ++e) prod *= pp.prime;
            prev = pp.prime;
        }
        REQUIRE(prod == n);
    }
}

TEST_CASE("multiplicative functions") {
    CHECK(divisor_count(factorize(1)) == 1);
    CHECK(divisor_count(factorize(12)) == 6);
    CHECK(divisor_count(factorize(1000003)) == 2);
    CHECK(euler_phi(factorize(1)) == 1);
    CHECK(euler_phi(factorize(10)) == 4);
    CHECK(euler_phi(factorize(60)) == 16);
    CHECK(big_omega(factorize(1)) == 0);
    CHECK(big_omega(factorize(12)) == 3);
    CHECK(big_omega(factorize(625)) == 4);

    std::mt19937_64 rng(3);
    int done = 0;
    while (done < 1000) {
        const u64 m = rng() % 10000 + 1, n = rng() % 10000 + 1;
        if (std::gcd(m, n) != 1) continue;
        REQUIRE(euler_phi(factorize(m * n)) == euler_phi(factorize(m)) * euler_phi(factorize(n)));
        ++done;
    }
}

TEST_CASE("least and greatest prime factor") {
    CHECK(least_prime_factor(12) == 2);
    CHECK(greatest_prime_factor(12) == 3);
    CHECK(least_prime_factor(145) == 5);
    CHECK(greatest_prime_factor(145) == 29);
    CHECK(least_prime_factor(29) == 29);
    CHECK(greatest_prime_factor(29) == 29);
    CHECK_THROWS_AS(least_prime_factor(1), DomainError);
    CHECK_THROWS_AS(greatest_prime_factor(1), DomainError);
}

namespace {
u64 smooth_brute(u64 x, double y) {
    u64 c = 0;
    for (u64 n = 1; n <= x; ++n) {
        const auto f = oracle::factor(n);
        if (f.empty() || static_cast<double>(f.back().first) <= y) ++c;
    }
    return c;
}
}  // namespace

TEST_CASE("smooth_count") {
    CHECK(smooth_count(10, 10) == 10);
    CHECK(smooth_count(100, 5) == 34);
    CHECK(smooth_count(100, 1) == 1);
    for (u64 x : {1ull, 17ull, 1000ull, 20000ull}) {
        for (double y : {1.5, 2.0, 7.3, 50.0, 400.0, 1e6}) {
            REQUIRE(smooth_count(x, y) == smooth_brute(x, y));
        }
    }
    // Large x with many primes goes through the gpf sieve.
    CHECK(smooth_count(200000, 1000) == smooth_brute(200000, 1000));
    u64 prev = 0;
    for (double y = 1; y < 300; y *= 1.7) {
        const u64 s = smooth_count(1000000, y);
        CHECK(s >= prev);
        prev = s;
    }
    CHECK(smooth_count(123457, 123457) == 123457);
}

TEST_CASE("partial sums of d(n)^2") {
    CHECK(d2_partial(1) == 1);
    CHECK(d2_partial(4) == 18);
    CHECK(d2_over_n_partial(1) == doctest::Approx(1.0));
    CHECK(d2_over_n_partial(4) == doctest::Approx(1 + 2.0 + 4.0 / 3 + 9.0 / 4).epsilon(1e-15));

    // Direct loop with divisor counts from trial division.
    u64 s2 = 0;
    long double s = 0;
    double prev = 0;
    for (u64 n = 1; n <= 100000; ++n) {
        const u64 d = oracle::divisor_count(n);
        s2 += d * d;
        s += static_cast<long double>(d * d) / n;
    }
    CHECK(d2_partial(100000) == s2);
    CHECK(d2_over_n_partial(100000) == doctest::Approx(static_cast<double>(s)).epsilon(1e-13));
    for (u64 x : {1ull, 10ull, 100ull, 1000ull, 10000ull}) {
        CHECK(d2_over_n_partial(x) == doctest::Approx(d2_over_n_exact(x)).epsilon(1e-14));
        CHECK(d2_over_n_partial(x) >= prev);
        prev = d2_over_n_partial(x);
    }
    CHECK_THROWS_AS(d2_over_n_exact(20000), CapacityError);
}

TEST_CASE("table cache round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "es_arith_cache_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "tables.bin";
    const auto t = sieve_tables(5000, true);
    t.save(file);
    const auto back = ArithTables::load(file, 5000, true);
    REQUIRE(back.has_value());
    CHECK(back->divisor_count(4096) == 13);
    CHECK(back->phi(4999) == 4998);
    CHECK_FALSE(ArithTables::load(file, 6000, true).has_value());
    CHECK_FALSE(ArithTables::load(file, 5000, false).has_value());
    CHECK_FALSE(ArithTables::load(dir / "missing.bin", 5000, true).has_value());
    std::filesystem::remove_all(dir);
}
