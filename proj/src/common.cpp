#include "es/common.hpp"

#include <algorithm>
#include <cmath>

namespace es {

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

u128 parse_u128(std::string_view text) {
    if (text.empty()) throw DomainError("empty integer literal");
    u128 v = 0;
    for (char ch : text) {
        if (ch < '0' || ch > '9') throw DomainError("not a nonnegative integer: " + std::string(text));
        u128 next = v * 10 + static_cast<unsigned>(ch - '0');
        if (next / 10 != v) throw CapacityError("integer literal exceeds 128 bits");
        v = next;
    }
    return v;
}

u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("128-bit multiplication overflow");
    return r;
}

u64 checked_mul(u64 a, u64 b) {
    u64 r;
    if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("64-bit multiplication overflow");
    return r;
}

bool int_greater(u128 v, double z) {
    if (std::isnan(z)) return false;
    if (z < 0) return true;
    // 2^127 as a double; every u128 below it compares through floor(z).
    if (z >= 1.7014118346046923e38) return false;
    const double fl = std::floor(z);
    // fl is an integer-valued double < 2^127, exactly convertible.
    const u128 zi = static_cast<u128>(fl);
    return v > zi;
}

}  // namespace es
