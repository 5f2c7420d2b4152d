#include "es/congruence.hpp"

#include <numeric>

#include "es/primality.hpp"

namespace es::congruence {

int legendre(u64 a, u64 p) {
    a %= p;
    if (a == 0) return 0;
    const u64 e = arith::powmod(a, (p - 1) / 2, p);
    return e == 1 ? 1 : -1;
}

unsigned quad_root_count_prime(u64 l, u64 p) {
    if (!arith::is_prime(p)) throw DomainError("quad_root_count_prime: " + std::to_string(p) + " is not prime");
    if (l == 0) throw DomainError("quad_root_count_prime: l must be positive");
    if (p == 2) return 0;          // 4 l x^2 + 1 is odd
    if (l % p == 0) return 0;      // reduces to 1 = 0
    // x^2 = -(4l)^{-1} (mod p); the residue is nonzero so there are 0 or 2 roots.
    const u64 four_l = arith::mulmod(4 % p, l % p, p);
    const u64 inv = arith::powmod(four_l, p - 2, p);
    const u64 target = (p - inv) % p;
    return legendre(target, p) == 1 ? 2 : 0;
}

u64 quad_root_count(u64 l, const arith::Factorization& f) {
    u64 g = 1;
    for (const auto& pp : f.factors) {
        if ((pp.prime >> 64) != 0) throw CapacityError("quad_root_count: prime factor exceeds 64 bits");
        const unsigned c = quad_root_count_prime(l, static_cast<u64>(pp.prime));
        if (c == 0) return 0;
        g *= c;
    }
    return g;
}

u64 quad_root_count(u64 l, u64 n) {
    if (n == 0) throw DomainError("quad_root_count: n must be positive");
    if (l == 0) throw DomainError("quad_root_count: l must be positive");
    if (n == 1) return 1;
    return quad_root_count(l, arith::factorize(n));
}

u64 quad_root_count_oracle(u64 l, u64 n) {
    if (n == 0) throw DomainError("quad_root_count_oracle: n must be positive");
    if (n > kOracleModulusLimit) throw CapacityError("quad_root_count_oracle: modulus above 10^6");
    const u64 coeff = static_cast<u64>((static_cast<u128>(4) * l) % n);
    u64 count = 0;
    for (u64 x = 0; x < n; ++x) {
        const u64 x2 = x * x % n;
        if ((coeff * x2 + 1) % n == 0) ++count;
    }
    return count;
}

unsigned linear_root_count(u64 a, u64 n) {
    if (n == 0) throw DomainError("linear_root_count: n must be positive");
    if (n == 1) return 1;
    const u64 a_mod = a % n;
    const u64 coeff = static_cast<u64>(static_cast<u128>(4) * a_mod % n * a_mod % n);
    return std::gcd(coeff, n) == 1 ? 1 : 0;
}

}  // namespace es::congruence
