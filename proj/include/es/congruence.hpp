#pragma once

#include "es/arith.hpp"
#include "es/common.hpp"

namespace es::congruence {

// The quadratic congruence 4 l x^2 + 1 = 0 (mod n) for a fixed coefficient l.
struct CongruenceInstance {
    u64 l = 1;
    u64 n = 1;
};

// Roots of 4 l x^2 + 1 modulo a prime p: 0 for p = 2 or p | l, else 0 or 2 by
// the quadratic character of -(4l)^{-1}. Throws DomainError if p is not prime.
unsigned quad_root_count_prime(u64 l, u64 p);

// G(n) as the product of quad_root_count_prime over the primes dividing n.
// Root counts are unchanged under lifting to p^e because g' = 8 l x never
// vanishes at a root for odd p not dividing l.
u64 quad_root_count(u64 l, u64 n);
u64 quad_root_count(u64 l, const arith::Factorization& n);

inline constexpr u64 kOracleModulusLimit = 1'000'000;

// Direct count over x in [0, n). n <= kOracleModulusLimit.
u64 quad_root_count_oracle(u64 l, u64 n);

// Solutions l mod n of 4 a^2 l + 1 = 0 (mod n): 1 when gcd(4a^2, n) = 1, else 0.
unsigned linear_root_count(u64 a, u64 n);

// Legendre symbol (a | p) for an odd prime p, in {-1, 0, 1}.
int legendre(u64 a, u64 p);

}  // namespace es::congruence
