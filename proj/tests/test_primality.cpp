#include <doctest.h>

#include <random>

#include "es/primality.hpp"
#include "oracles.hpp"

using namespace es;
using namespace es::arith;

TEST_CASE("is_prime matches trial division below 2^20") {
    for (u64 n = 0; n < (1u << 20); ++n) {
        REQUIRE(is_prime(n) == oracle::is_prime(n));
    }
}

TEST_CASE("is_prime on known 64-bit values") {
    CHECK(is_prime(u64{18446744073709551557ull}));   // largest 64-bit prime
    CHECK_FALSE(is_prime(u64{18446744073709551615ull}));
    CHECK_FALSE(is_prime(u64{3215031751}));          // spsp to bases 2,3,5,7
    CHECK_FALSE(is_prime(u64{3825123056546413051ull}));  // spsp to bases up to 23
    CHECK(is_prime(u64{1000000000000000003ull}));
    CHECK_FALSE(is_prime(u64{1000000007ull * 998244353ull}));
    CHECK(is_prime(u64{4611686018427387847ull}));    // 2^62 - 57
}

TEST_CASE("size-banded bases agree with the full 64-bit base set") {
    auto full = [](u64 n) {
        if (n < 2 || n % 2 == 0) return n == 2;
        const Montgomery64 mont(n);
        for (u64 b : kMillerRabinBases64) {
            if (!strong_probable_prime(mont, b)) return false;
        }
        return true;
    };
    std::vector<u64> v;
    for (u64 c : {u64{4759123141}, u64{3474749660383}}) {
        for (u64 d = c - 3000; d < c + 3000; ++d) v.push_back(d);
    }
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200000; ++i) v.push_back(rng() >> (20 + rng() % 24));
    for (u64 n : v) {
        INFO("n = " << n);
        REQUIRE(is_prime(n) == full(n));
    }
    // Band edges are strong pseudoprimes to the smaller sets.
    CHECK_FALSE(is_prime(u64{4759123141}));
    CHECK_FALSE(is_prime(u64{3474749660383}));
    for (u64 n = 4759123141 - 200; n < 4759123141 + 200; ++n) CHECK(is_prime(n) == oracle::is_prime(n));
}

TEST_CASE("is_prime on 128-bit values") {
    const u128 m61 = (u128{1} << 61) - 1;
    const u128 m89 = (u128{1} << 89) - 1;
    CHECK(is_prime(m61));
    CHECK(is_prime(m89));
    CHECK_FALSE(is_prime(m61 * m61));
    CHECK_FALSE(is_prime(m89 * 3));
    CHECK_FALSE(is_prime((u128{1} << 67) - 1));  // 193707721 * 761838257287
}

TEST_CASE("Montgomery multiplication agrees with 128-bit remainder") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const u64 n = rng() | 1;
        Montgomery64 m(n);
        for (int t = 0; t < 20; ++t) {
            const u64 a = rng() % n, b = rng() % n;
            REQUIRE(m.from(m.mul(m.to(a), m.to(b))) == mulmod(a, b, n));
        }
        const u64 e = rng();
        const u64 base = rng() % n;
        REQUIRE(m.from(m.pow(m.to(base), e)) == powmod(base, e, n));
    }
}

TEST_CASE("pollard_brent finds a proper factor") {
    const u64 cases[] = {1000000007ull * 998244353ull, 4294967291ull * 4294967279ull,
                         91, 3 * 1000003ull, 600851475143ull};
    for (u64 n : cases) {
        const u64 f = pollard_brent(n);
        CHECK(f > 1);
        CHECK(f < n);
        CHECK(n % f == 0);
    }
    const u128 big = static_cast<u128>(18446744073709551557ull) * 1000000007ull;
    const u128 f = pollard_brent(big);
    CHECK(f > 1);
    CHECK(f < big);
    CHECK(big % f == 0);
}

TEST_CASE("integer roots") {
    for (u64 r : {0ull, 1ull, 2ull, 3ull, 4294967295ull, 1000000ull}) {
        CHECK(isqrt(r * r) == r);
        if (r > 0) CHECK(isqrt(r * r - 1) == r - 1);
    }
    CHECK(isqrt(~u64{0}) == 4294967295ull);
    CHECK(icbrt(u64{27}) == 3);
    CHECK(icbrt(u64{26}) == 2);
    CHECK(icbrt(~u64{0}) == 2642245);
    CHECK(isqrt(u128{1} << 100) == (u128{1} << 50));
    CHECK(is_square(144));
    CHECK_FALSE(is_square(145));
}
