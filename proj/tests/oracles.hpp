#pragma once

// Brute-force references used only by the tests. Deliberately naive.

#include <cstdint>
#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "es/common.hpp"

namespace oracle {

using es::u64;
using es::u128;

inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

inline std::vector<std::pair<u64, unsigned>> factor(u64 n) {
    std::vector<std::pair<u64, unsigned>> out;
    for (u64 d = 2; d * d <= n; ++d) {
        unsigned e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        if (e) out.push_back({d, e});
    }
    if (n > 1) out.push_back({n, 1});
    return out;
}

inline u64 divisor_count(u64 n) {
    u64 c = 0;
    for (u64 d = 1; d * d <= n; ++d) {
        if (n % d == 0) c += (d * d == n) ? 1 : 2;
    }
    return c;
}

inline u64 phi(u64 n) {
    u64 c = 0;
    for (u64 k = 1; k <= n; ++k) {
        if (std::gcd(k, n) == 1) ++c;
    }
    return c;
}

struct Triple {
    u64 n1, n2, n3;
    bool operator==(const Triple&) const = default;
};

// Every n1 <= n2 <= n3 with 4/n = 1/n1 + 1/n2 + 1/n3. n1 and n2 are looped
// over their full ranges and n3 is solved for exactly.
inline std::vector<Triple> solutions(u64 n) {
    std::vector<Triple> out;
    for (u64 n1 = 1; n1 <= 3 * n / 4 + 1; ++n1) {
        if (4 * n1 <= n) continue;
        // remaining r = (4 n1 - n) / (n n1); n2 <= 2 / r
        const u128 rn = 4 * n1 - n, rd = static_cast<u128>(n) * n1;
        for (u64 n2 = n1; static_cast<u128>(n2) * rn <= 2 * rd; ++n2) {
            // r - 1/n2 = (rn n2 - rd) / (rd n2)
            if (static_cast<u128>(n2) * rn <= rd) continue;
            const u128 num = static_cast<u128>(n2) * rn - rd;
            const u128 den = rd * n2;
            if (den % num != 0) continue;
            const u128 n3 = den / num;
            if (n3 >= n2) out.push_back({n1, n2, static_cast<u64>(n3)});
        }
    }
    return out;
}

// Ordered (f1, f2) for a prime p: every distinct permutation of every
// solution, split by how many entries p divides.
inline std::pair<u64, u64> type_counts(u64 p) {
    u64 f1 = 0, f2 = 0;
    for (const Triple& t : solutions(p)) {
        std::array<u64, 3> v{t.n1, t.n2, t.n3};
        std::set<std::array<u64, 3>> perms;
        do {
            perms.insert(v);
        } while (std::next_permutation(v.begin(), v.end()));
        const int k = (t.n1 % p == 0) + (t.n2 % p == 0) + (t.n3 % p == 0);
        if (k == 1) f1 += perms.size();
        if (k == 2) f2 += perms.size();
    }
    return {f1, f2};
}

}  // namespace oracle
