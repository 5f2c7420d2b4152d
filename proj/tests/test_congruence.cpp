#include <doctest.h>

#include <random>

#include "es/arith.hpp"
#include "es/congruence.hpp"

using namespace es;
using namespace es::congruence;

TEST_CASE("roots modulo a prime") {
    CHECK(quad_root_count_prime(1, 2) == 0);
    CHECK(quad_root_count_prime(1, 5) == 2);
    CHECK(quad_root_count_prime(3, 13) == 2);
    CHECK(quad_root_count_prime(7, 7) == 0);
    CHECK_THROWS_AS(quad_root_count_prime(1, 15), DomainError);
    CHECK_THROWS_AS(quad_root_count_prime(0, 5), DomainError);
}

TEST_CASE("root counts on composite moduli") {
    CHECK(quad_root_count(1, 1) == 1);
    CHECK(quad_root_count(99, 1) == 1);
    CHECK(quad_root_count(1, 15) == 0);
    CHECK(quad_root_count(1, 25) == 2);
    CHECK_THROWS_AS(quad_root_count(1, 0), DomainError);
    CHECK(quad_root_count_oracle(1, 5) == 2);
    // 8x^2 + 1 = 0 (mod 9) means x^2 = 1, so x = 1 and x = 8.
    CHECK(quad_root_count_oracle(2, 9) == 2);
    CHECK(quad_root_count(2, 9) == 2);
    CHECK(quad_root_count_oracle(7, 1) == 1);
    CHECK_THROWS_AS(quad_root_count_oracle(1, 2000000), CapacityError);
}

TEST_CASE("root count equals the exhaustive count for n <= 5000, l <= 20") {
    for (u64 l = 1; l <= 20; ++l) {
        for (u64 n = 1; n <= 5000; ++n) {
            REQUIRE(quad_root_count(l, n) == quad_root_count_oracle(l, n));
        }
    }
}

TEST_CASE("root count is multiplicative and bounded by d(n)") {
    std::mt19937_64 rng(5);
    int done = 0;
    while (done < 1000) {
        const u64 m = rng() % 1000 + 1, n = rng() % 1000 + 1;
        const u64 l = rng() % 50 + 1;
        if (std::gcd(m, n) != 1) continue;
        const u64 g = quad_root_count_oracle(l, m * n);
        REQUIRE(g == quad_root_count_oracle(l, m) * quad_root_count_oracle(l, n));
        REQUIRE(quad_root_count(l, m * n) == g);
        REQUIRE(g <= arith::divisor_count(arith::factorize(m * n)));
        ++done;
    }
}

TEST_CASE("root count does not depend on the exponent of a prime power") {
    for (u64 p : arith::primes_up_to(100)) {
        for (u64 l = 1; l <= 20; ++l) {
            u64 q = p;
            const u64 base = quad_root_count_oracle(l, p);
            for (int e = 1; e <= 4 && q <= 1000000; ++e, q *= p) {
                REQUIRE(quad_root_count_oracle(l, q) == base);
                REQUIRE(quad_root_count(l, q) == base);
            }
        }
    }
}

TEST_CASE("linear congruence count") {
    CHECK(linear_root_count(1, 3) == 1);
    CHECK(linear_root_count(1, 2) == 0);
    CHECK(linear_root_count(3, 9) == 0);
    CHECK(linear_root_count(5, 1) == 1);
    for (u64 n = 1; n <= 2000; ++n) {
        for (u64 a = 1; a <= 50; ++a) {
            u64 c = 0;
            const u64 coeff = 4 * a * a % n;
            for (u64 l = 0; l < n; ++l) {
                if ((coeff * l + 1) % n == 0) ++c;
            }
            REQUIRE(linear_root_count(a, n) == c);
        }
    }
}
