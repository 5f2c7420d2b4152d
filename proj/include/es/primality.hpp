#pragma once

#include <array>
#include <span>

#include "es/common.hpp"

namespace es::arith {

// Bases making the strong probable-prime test deterministic for every n < 2^64.
inline constexpr std::array<u64, 7> kMillerRabinBases64 = {
    2, 325, 9375, 28178, 450775, 9780504, 1795265022};
inline constexpr std::array<u64, 3> kMillerRabinBases32 = {2, 7, 61};      // n < 4759123141
inline constexpr std::array<u64, 6> kMillerRabinBases41 = {2, 3, 5, 7, 11, 13};  // n < 3474749660383

// Smallest of the sets above that is deterministic for n. The bases may
// vanish mod n only when n <= 61 or the 64-bit set is returned.
inline std::span<const u64> miller_rabin_bases(u64 n) {
    if (n < 4759123141ULL) return kMillerRabinBases32;
    if (n < 3474749660383ULL) return kMillerRabinBases41;
    return kMillerRabinBases64;
}

inline u64 mulmod(u64 a, u64 b, u64 n) {
    return static_cast<u64>(static_cast<u128>(a) * b % n);
}

u64 powmod(u64 base, u64 exp, u64 n);

// Montgomery arithmetic modulo an odd n < 2^64 with R = 2^64.
class Montgomery64 {
public:
    explicit Montgomery64(u64 n);

    u64 modulus() const { return n_; }
    u64 one() const { return one_; }
    u64 to(u64 a) const { return mul(a % n_, r2_); }
    u64 from(u64 a) const { return reduce(a); }

    u64 mul(u64 a, u64 b) const { return reduce(static_cast<u128>(a) * b); }
    u64 pow(u64 base_m, u64 exp) const;
    u64 add(u64 a, u64 b) const {
        u64 s = a + b;
        return (s >= n_ || s < a) ? s - n_ : s;
    }
    u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (n_ - b); }

private:
    u64 reduce(u128 t) const {
        const u64 m = static_cast<u64>(t) * ninv_;
        const u64 hi = static_cast<u64>(t >> 64);
        const u64 mn_hi = static_cast<u64>((static_cast<u128>(m) * n_) >> 64);
        return hi >= mn_hi ? hi - mn_hi : hi - mn_hi + n_;
    }

    u64 n_;
    u64 ninv_;  // n^{-1} mod 2^64
    u64 one_;   // R mod n
    u64 r2_;    // R^2 mod n
};

// Strong probable-prime test of odd n > 2 to the given base.
bool strong_probable_prime(u64 n, u64 base);
bool strong_probable_prime(const Montgomery64& mont, u64 base);

// Deterministic for all 64-bit inputs.
bool is_prime(u64 n);

// Deterministic below 3.3e24 (first 13 prime bases), probable-prime above.
bool is_prime(u128 n);

// A nontrivial factor of an odd composite n (Brent's variant of Pollard rho).
u64 pollard_brent(u64 n);
u128 pollard_brent(u128 n);

u64 isqrt(u64 n);
u128 isqrt(u128 n);
u64 icbrt(u64 n);

inline bool is_square(u64 n, u64* root = nullptr) {
    const u64 r = isqrt(n);
    if (root) *root = r;
    return r * r == n;
}

}  // namespace es::arith
