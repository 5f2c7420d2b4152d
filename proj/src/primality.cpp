#include "es/primality.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace es::arith {

u64 powmod(u64 base, u64 exp, u64 n) {
    if (n == 1) return 0;
    u64 result = 1;
    base %= n;
    while (exp != 0) {
        if (exp & 1) result = mulmod(result, base, n);
        base = mulmod(base, base, n);
        exp >>= 1;
    }
    return result;
}

Montgomery64::Montgomery64(u64 n) : n_(n) {
    if ((n & 1) == 0) throw DomainError("Montgomery modulus must be odd");
    u64 inv = n;  // correct to 3 bits for odd n
    for (int i = 0; i < 5; ++i) inv *= 2 - n * inv;
    ninv_ = inv;
    one_ = static_cast<u64>((static_cast<u128>(1) << 64) % n);
    r2_ = static_cast<u64>(static_cast<u128>(one_) * one_ % n);
}

u64 Montgomery64::pow(u64 base_m, u64 exp) const {
    u64 result = one_;
    while (exp != 0) {
        if (exp & 1) result = mul(result, base_m);
        base_m = mul(base_m, base_m);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime(const Montgomery64& mont, u64 base) {
    const u64 n = mont.modulus();
    base %= n;
    if (base == 0) return true;
    const u64 n_minus_1 = n - 1;
    const int s = std::countr_zero(n_minus_1);
    const u64 d = n_minus_1 >> s;
    const u64 one = mont.one();
    const u64 minus_one = n - one;
    u64 x = mont.pow(mont.to(base), d);
    if (x == one || x == minus_one) return true;
    for (int i = 1; i < s; ++i) {
        x = mont.mul(x, x);
        if (x == minus_one) return true;
        if (x == one) return false;
    }
    return false;
}

bool strong_probable_prime(u64 n, u64 base) {
    return strong_probable_prime(Montgomery64(n), base);
}

namespace {

constexpr u64 kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};

u128 mulmod128(u128 a, u128 b, u128 n) {
    if (a >= n) a %= n;
    if (b >= n) b %= n;
    if ((a >> 64) == 0 && (b >> 64) == 0) {
        // Product fits in 128 bits.
        return (a * b) % n;
    }
    u128 result = 0;
    while (b != 0) {
        if (b & 1) {
            result = (result >= n - a) ? result - (n - a) : result + a;
        }
        a = (a >= n - a) ? a - (n - a) : a + a;
        b >>= 1;
    }
    return result;
}

u128 powmod128(u128 base, u128 exp, u128 n) {
    u128 result = 1 % n;
    base %= n;
    while (exp != 0) {
        if (exp & 1) result = mulmod128(result, base, n);
        base = mulmod128(base, base, n);
        exp >>= 1;
    }
    return result;
}

bool strong_probable_prime128(u128 n, u128 base) {
    base %= n;
    if (base == 0) return true;
    u128 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    u128 x = powmod128(base, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod128(x, x, n);
        if (x == n - 1) return true;
        if (x == 1) return false;
    }
    return false;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : kSmallPrimes) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    if (n < 53 * 53) return true;
    const Montgomery64 mont(n);
    for (u64 base : miller_rabin_bases(n)) {
        if (!strong_probable_prime(mont, base)) return false;
    }
    return true;
}

bool is_prime(u128 n) {
    if ((n >> 64) == 0) return is_prime(static_cast<u64>(n));
    for (u64 p : kSmallPrimes) {
        if (n % p == 0) return false;
    }
    for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
        if (!strong_probable_prime128(n, p)) return false;
    }
    return true;
}

u64 pollard_brent(u64 n) {
    if ((n & 1) == 0) return 2;
    for (u64 p : kSmallPrimes) {
        if (n % p == 0 && n != p) return p;
    }
    {
        u64 r;
        if (is_square(n, &r)) return r;
    }
    const Montgomery64 mont(n);
    for (u64 c = 1;; ++c) {
        const u64 cm = mont.to(c);
        auto f = [&](u64 x) { return mont.add(mont.mul(x, x), cm); };
        u64 y = mont.to(2);
        u64 x = y;
        u64 ys = y;
        u64 g = 1;
        u64 q = mont.one();
        const u64 m = 128;
        for (u64 r = 1; g == 1; r <<= 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && g == 1; k += m) {
                ys = y;
                const u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mont.mul(q, x > y ? x - y : y - x);
                }
                g = std::gcd(mont.from(q), n);
            }
        }
        if (g == n) {
            // Backtrack one step at a time from the saved position.
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

u128 pollard_brent(u128 n) {
    if ((n >> 64) == 0) return pollard_brent(static_cast<u64>(n));
    if ((n & 1) == 0) return 2;
    auto gcd128 = [](u128 a, u128 b) {
        while (b != 0) {
            const u128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    };
    for (u128 c = 1;; ++c) {
        auto f = [&](u128 x) {
            const u128 sq = mulmod128(x, x, n);
            return sq >= n - c ? sq - (n - c) : sq + c;
        };
        u128 x = 2, y = 2, ys = 2, q = 1, g = 1;
        const u64 m = 64;
        for (u64 r = 1; g == 1; r <<= 1) {
            x = y;
            for (u64 i = 0; i < r; ++i) y = f(y);
            for (u64 k = 0; k < r && g == 1; k += m) {
                ys = y;
                const u64 lim = std::min(m, r - k);
                for (u64 i = 0; i < lim; ++i) {
                    y = f(y);
                    q = mulmod128(q, x > y ? x - y : y - x, n);
                }
                g = gcd128(q, n);
            }
        }
        if (g == n) {
            do {
                ys = f(ys);
                g = gcd128(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

u64 isqrt(u64 n) {
    u64 r = static_cast<u64>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && static_cast<u128>(r) * r > n) --r;
    while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
    return r;
}

u128 isqrt(u128 n) {
    if ((n >> 64) == 0) return isqrt(static_cast<u64>(n));
    u128 r = static_cast<u128>(std::sqrt(static_cast<long double>(n)));
    auto sq_gt = [&](u128 v) {
        u128 p;
        return __builtin_mul_overflow(v, v, &p) || p > n;
    };
    while (r > 0 && sq_gt(r)) --r;
    while (!sq_gt(r + 1)) ++r;
    return r;
}

u64 icbrt(u64 n) {
    u64 r = static_cast<u64>(std::cbrt(static_cast<double>(n)));
    auto cube_gt = [&](u64 v) { return static_cast<u128>(v) * v * v > n; };
    while (r > 0 && cube_gt(r)) --r;
    while (!cube_gt(r + 1)) ++r;
    return r;
}

}  // namespace es::arith
