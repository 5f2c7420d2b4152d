#include <immintrin.h>

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>
#include <vector>

#include "es/kernels.hpp"
#include "es/primality.hpp"

// Base-2 Miller-Rabin and extra strong Lucas over 8 lanes using IFMA Montgomery
// products (R = 2^52). Even lanes and lanes outside (64, 2^53) are left to the
// scalar path.

namespace es::kernels::avx512 {

namespace {

constexpr int kUnroll = 4;
constexpr int kLanes = 8;
constexpr int kGroup = kLanes * kUnroll;
constexpr u64 kMask52 = (u64{1} << 52) - 1;

// Moduli below 2^53 take the Wide form: bit 52 of a, b and n is added back by
// hand, and since R < n the result is below 3n.
template <bool Wide>
inline __m512i mont_mul(__m512i a, __m512i b, __m512i n, __m512i nprime) {
    const __m512i z = _mm512_setzero_si512();
    const __m512i lo = _mm512_madd52lo_epu64(z, a, b);
    __m512i hi = _mm512_madd52hi_epu64(z, a, b);
    const __m512i m = _mm512_madd52lo_epu64(z, lo, nprime);
    hi = _mm512_madd52hi_epu64(hi, m, n);
    // lo + lo52(m*n) is 0 or exactly 2^52; it is nonzero iff lo is.
    const __mmask8 carry = _mm512_test_epi64_mask(lo, lo);
    hi = _mm512_mask_add_epi64(hi, carry, hi, _mm512_set1_epi64(1));
    if constexpr (Wide) {
        const __m512i top = _mm512_set1_epi64(static_cast<long long>(u64{1} << 52));
        const __m512i low = _mm512_set1_epi64(static_cast<long long>(kMask52));
        const __mmask8 a1 = _mm512_test_epi64_mask(a, top);
        const __mmask8 b1 = _mm512_test_epi64_mask(b, top);
        const __mmask8 n1 = _mm512_test_epi64_mask(n, top);
        hi = _mm512_mask_add_epi64(hi, a1, hi, _mm512_and_si512(b, low));
        hi = _mm512_mask_add_epi64(hi, b1, hi, _mm512_and_si512(a, low));
        hi = _mm512_mask_add_epi64(hi, static_cast<__mmask8>(a1 & b1), hi, top);
        hi = _mm512_mask_add_epi64(hi, n1, hi, m);
        const __mmask8 ge2 = _mm512_cmpge_epu64_mask(hi, n);
        hi = _mm512_mask_sub_epi64(hi, ge2, hi, n);
    }
    const __mmask8 ge = _mm512_cmpge_epu64_mask(hi, n);
    return _mm512_mask_sub_epi64(hi, ge, hi, n);
}

inline __m512i add_mod(__m512i a, __m512i b, __m512i n) {
    const __m512i s = _mm512_add_epi64(a, b);
    const __mmask8 ge = _mm512_cmpge_epu64_mask(s, n);
    return _mm512_mask_sub_epi64(s, ge, s, n);
}

struct Setup {
    __m512i n, nprime, one, minus_one, d, s;
};

inline Setup make_setup(__m512i n) {
    Setup st;
    st.n = n;
    // -n^{-1} mod 2^52 by Newton iteration in 64-bit lanes.
    __m512i inv = n;
    const __m512i two = _mm512_set1_epi64(2);
    for (int i = 0; i < 5; ++i) inv = _mm512_mullo_epi64(inv, _mm512_sub_epi64(two, _mm512_mullo_epi64(n, inv)));
    st.nprime = _mm512_and_si512(_mm512_sub_epi64(_mm512_setzero_si512(), inv), _mm512_set1_epi64(kMask52));

    // 2^52 mod n from a floating quotient, corrected by one step either way.
    const __m512d nd = _mm512_cvtepu64_pd(n);
    const __m512d qd = _mm512_roundscale_pd(_mm512_div_pd(_mm512_set1_pd(4503599627370496.0), nd),
                                            _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
    const __m512i q = _mm512_cvttpd_epu64(qd);
    __m512i r = _mm512_sub_epi64(_mm512_set1_epi64(static_cast<long long>(u64{1} << 52)), _mm512_mullo_epi64(q, n));
    const __mmask8 neg = _mm512_cmplt_epi64_mask(r, _mm512_setzero_si512());
    r = _mm512_mask_add_epi64(r, neg, r, n);
    const __mmask8 ge = _mm512_cmpge_epu64_mask(r, n);
    r = _mm512_mask_sub_epi64(r, ge, r, n);
    st.one = r;
    st.minus_one = _mm512_sub_epi64(n, r);

    const __m512i nm1 = _mm512_sub_epi64(n, _mm512_set1_epi64(1));
    const __m512i lowbit = _mm512_and_si512(nm1, _mm512_sub_epi64(_mm512_setzero_si512(), nm1));
    st.s = _mm512_sub_epi64(_mm512_set1_epi64(63), _mm512_lzcnt_epi64(lowbit));
    st.d = _mm512_srlv_epi64(nm1, st.s);
    return st;
}

// Montgomery form of a constant b < n, by doubling and adding R mod n.
inline __m512i to_mont(u64 b, const Setup& st) {
    __m512i acc = _mm512_setzero_si512();
    for (int bit = 63 - std::countl_zero(b); bit >= 0; --bit) {
        acc = add_mod(acc, acc, st.n);
        if ((b >> bit) & 1) acc = add_mod(acc, st.one, st.n);
    }
    return acc;
}

// Lanes for which x = base^d passes the strong test after squarings.
template <bool Wide>
inline __mmask8 finish(__m512i x, const Setup& st) {
    __mmask8 ok = _mm512_cmpeq_epi64_mask(x, st.one) | _mm512_cmpeq_epi64_mask(x, st.minus_one);
    __mmask8 done = ok;
    const u64 max_s = _mm512_reduce_max_epu64(st.s);
    for (u64 i = 1; i < max_s; ++i) {
        const __mmask8 active =
            static_cast<__mmask8>(_mm512_cmpgt_epu64_mask(st.s, _mm512_set1_epi64(static_cast<long long>(i))) & ~done);
        if (active == 0) break;
        x = mont_mul<Wide>(x, x, st.n, st.nprime);
        const __mmask8 hit = _mm512_mask_cmpeq_epi64_mask(active, x, st.minus_one);
        const __mmask8 dead = _mm512_mask_cmpeq_epi64_mask(active, x, st.one);
        ok |= hit;
        done |= static_cast<__mmask8>(hit | dead);
    }
    return ok;
}

int exponent_bits(const Setup* st) {
    u64 max_d = 0;
    for (int u = 0; u < kUnroll; ++u) max_d = std::max<u64>(max_d, _mm512_reduce_max_epu64(st[u].d));
    return 64 - std::countl_zero(max_d);
}

void store_pass(const __mmask8* ok, u8* pass) {
    for (int u = 0; u < kUnroll; ++u) {
        for (int l = 0; l < kLanes; ++l) pass[kLanes * u + l] = (ok[u] >> l) & 1;
    }
}

// Base 2, left to right: multiplying by the base is a modular doubling.
template <bool Wide>
void sprp2_group(const u64* vals, u8* pass) {
    Setup st[kUnroll];
    __m512i x[kUnroll];
    for (int u = 0; u < kUnroll; ++u) {
        st[u] = make_setup(_mm512_loadu_si512(vals + kLanes * u));
        x[u] = st[u].one;
    }
    for (int bit = exponent_bits(st) - 1; bit >= 0; --bit) {
        const __m512i sel = _mm512_set1_epi64(static_cast<long long>(u64{1} << bit));
#pragma GCC unroll 4
        for (int u = 0; u < kUnroll; ++u) {
            x[u] = mont_mul<Wide>(x[u], x[u], st[u].n, st[u].nprime);
            const __mmask8 k = _mm512_test_epi64_mask(st[u].d, sel);
            const __m512i s = _mm512_add_epi64(x[u], x[u]);
            const __mmask8 ge = _mm512_mask_cmpge_epu64_mask(k, s, st[u].n);
            x[u] = _mm512_mask_mov_epi64(x[u], k, _mm512_mask_sub_epi64(s, ge, s, st[u].n));
        }
    }
    __mmask8 ok[kUnroll];
    for (int u = 0; u < kUnroll; ++u) ok[u] = finish<Wide>(x[u], st[u]);
    store_pass(ok, pass);
}

inline __m512i sub_mod(__m512i a, __m512i b, __m512i n) {
    const __mmask8 lt = _mm512_cmplt_epu64_mask(a, b);
    const __m512i d = _mm512_sub_epi64(a, b);
    return _mm512_mask_add_epi64(d, lt, d, n);
}

// Extra strong Lucas test with Q = 1 and per-lane P (Jacobi(P^2 - 4, n) = -1):
// n + 1 = d 2^s; pass iff U_d = 0 and V_d = +-2, or V_{d 2^r} = 0 for some r < s - 1.
template <bool Wide>
void lucas_group(const u64* vals, const u64* ps, u8* pass) {
    Setup st[kUnroll];
    __m512i two[kUnroll], p[kUnroll], dl[kUnroll], sl[kUnroll], vk[kUnroll], vk1[kUnroll];
    u64 max_d = 0;
    for (int u = 0; u < kUnroll; ++u) {
        st[u] = make_setup(_mm512_loadu_si512(vals + kLanes * u));
        two[u] = add_mod(st[u].one, st[u].one, st[u].n);
        const __m512i pv = _mm512_loadu_si512(ps + kLanes * u);
        p[u] = _mm512_setzero_si512();
        for (int bit = 9; bit >= 0; --bit) {
            p[u] = add_mod(p[u], p[u], st[u].n);
            const __mmask8 k = _mm512_test_epi64_mask(pv, _mm512_set1_epi64(1 << bit));
            p[u] = _mm512_mask_mov_epi64(p[u], k, add_mod(p[u], st[u].one, st[u].n));
        }
        const __m512i np1 = _mm512_add_epi64(st[u].n, _mm512_set1_epi64(1));
        const __m512i lowbit = _mm512_and_si512(np1, _mm512_sub_epi64(_mm512_setzero_si512(), np1));
        sl[u] = _mm512_sub_epi64(_mm512_set1_epi64(63), _mm512_lzcnt_epi64(lowbit));
        dl[u] = _mm512_srlv_epi64(np1, sl[u]);
        max_d = std::max<u64>(max_d, _mm512_reduce_max_epu64(dl[u]));
        vk[u] = two[u];
        vk1[u] = p[u];
    }
    // Ladder on (V_k, V_{k+1}): V_{2k} = V_k^2 - 2, V_{2k+1} = V_k V_{k+1} - P.
    for (int bit = 63 - std::countl_zero(max_d); bit >= 0; --bit) {
        const __m512i sel = _mm512_set1_epi64(static_cast<long long>(u64{1} << bit));
#pragma GCC unroll 4
        for (int u = 0; u < kUnroll; ++u) {
            const __mmask8 k = _mm512_test_epi64_mask(dl[u], sel);
            const __m512i cross = sub_mod(mont_mul<Wide>(vk[u], vk1[u], st[u].n, st[u].nprime), p[u], st[u].n);
            const __m512i base = _mm512_mask_blend_epi64(k, vk[u], vk1[u]);
            const __m512i sq = sub_mod(mont_mul<Wide>(base, base, st[u].n, st[u].nprime), two[u], st[u].n);
            vk[u] = _mm512_mask_blend_epi64(k, sq, cross);
            vk1[u] = _mm512_mask_blend_epi64(k, cross, sq);
        }
    }
    __mmask8 ok[kUnroll];
    for (int u = 0; u < kUnroll; ++u) {
        const Setup& t = st[u];
        // D U_d = 2 V_{d+1} - P V_d, and gcd(D, n) = 1.
        const __mmask8 u_zero = _mm512_cmpeq_epi64_mask(add_mod(vk1[u], vk1[u], t.n), mont_mul<Wide>(p[u], vk[u], t.n, t.nprime));
        const __mmask8 v_pm2 = _mm512_cmpeq_epi64_mask(vk[u], two[u]) |
                               _mm512_cmpeq_epi64_mask(vk[u], _mm512_sub_epi64(t.n, two[u]));
        ok[u] = u_zero & v_pm2;
        __m512i v = vk[u];
        const u64 max_s = _mm512_reduce_max_epu64(sl[u]);
        for (u64 r = 0; r + 1 < max_s; ++r) {
            const __mmask8 active = _mm512_cmpgt_epu64_mask(sl[u], _mm512_set1_epi64(static_cast<long long>(r + 1)));
            ok[u] |= _mm512_mask_cmpeq_epi64_mask(active, v, _mm512_setzero_si512());
            v = sub_mod(mont_mul<Wide>(v, v, t.n, t.nprime), two[u], t.n);
        }
    }
    store_pass(ok, pass);
}

int jacobi(u64 a, u64 n) {
    a %= n;
    int t = 1;
    while (a != 0) {
        const int z = std::countr_zero(a);
        a >>= z;
        if ((z & 1) && (n % 8 == 3 || n % 8 == 5)) t = -t;
        if (a % 4 == 3 && n % 4 == 3) t = -t;
        std::swap(a, n);
        a %= n;
    }
    return n == 1 ? t : 0;
}

constexpr u32 kSmallOdd[] = {3, 5, 7, 11, 13, 17, 19, 23};
constexpr u32 kSmallOddProduct = 3u * 5 * 7 * 11 * 13 * 17 * 19 * 23;
constexpr u64 kTablePMax = 26;  // P - 2 and P + 2 are 23-smooth up to here

// Bit r set iff r is a nonzero square mod q.
constexpr u32 residue_mask(u32 q) {
    u32 m = 0;
    for (u32 x = 1; x < q; ++x) m |= u32{1} << (x * x % q);
    return m;
}

// Bit i set iff the i-th small prime (bit 8 for 2) divides P^2 - 4 to an odd power.
constexpr std::array<u32, kTablePMax + 1> odd_part_masks() {
    std::array<u32, kTablePMax + 1> out{};
    for (u64 p = 3; p <= kTablePMax; ++p) {
        u64 d = p * p - 4;
        u32 mask = 0;
        for (int i = 0; i <= 8; ++i) {
            const u64 q = i < 8 ? kSmallOdd[i] : 2;
            while (d % q == 0) {
                d /= q;
                mask ^= u32{1} << i;
            }
        }
        out[p] = mask;
    }
    return out;
}

// Smallest P >= 3 with Jacobi(P^2 - 4, n) = -1; 0 when n is composite by a
// common factor, a square, or needs P >= 1024 (left to the scalar test).
u64 lucas_parameter(u64 n) {
    if (arith::is_square(n)) return 0;
    static constexpr auto kMasks = odd_part_masks();
    static constexpr u32 kResidues[] = {residue_mask(3),  residue_mask(5),  residue_mask(7),  residue_mask(11),
                                        residue_mask(13), residue_mask(17), residue_mask(19), residue_mask(23)};
    // Jacobi(q, n) for the small primes, by reciprocity from n mod q.
    const u32 r = static_cast<u32>(n % kSmallOddProduct);
    int sym[9];
    for (int i = 0; i < 8; ++i) {
        const u32 q = kSmallOdd[i];
        const u32 nq = r % q;
        if (nq == 0) return 0;  // n > 64 has the factor q
        int leg = ((kResidues[i] >> nq) & 1) ? 1 : -1;
        if (q % 4 == 3 && n % 4 == 3) leg = -leg;
        sym[i] = leg;
    }
    sym[8] = (n % 8 == 1 || n % 8 == 7) ? 1 : -1;
    for (u64 p = 3; p <= kTablePMax; ++p) {
        int j = 1;
        for (int i = 0; i <= 8; ++i) {
            if ((kMasks[p] >> i) & 1) j *= sym[i];
        }
        if (j == -1) return p;
    }
    for (u64 p = kTablePMax + 1; p < 1024; ++p) {
        const int j = jacobi(p * p - 4, n);
        if (j == -1) return p;
        if (j == 0 && p * p - 4 != n) return 0;
    }
    return 0;
}

constexpr u64 kWideFrom = u64{1} << 52;

// Odd values above the largest small base, within the Montgomery range.
bool eligible(u64 v) { return (v & 1) != 0 && v > 64 && v < (u64{1} << 53); }

template <class Test>
void run_groups(std::span<const u64> values, std::vector<u32>& live, std::span<u8> out, Test test) {
    alignas(64) u64 buf[kGroup];
    u8 pass[kGroup];
    std::size_t kept = 0;
    for (std::size_t g = 0; g < live.size(); g += kGroup) {
        const std::size_t cnt = std::min<std::size_t>(kGroup, live.size() - g);
        for (std::size_t j = 0; j < kGroup; ++j) buf[j] = values[live[g + std::min(j, cnt - 1)]];
        test(buf, pass);
        for (std::size_t j = 0; j < cnt; ++j) {
            if (pass[j]) {
                live[kept++] = live[g + j];
            } else {
                out[live[g + j]] = 0;
            }
        }
    }
    live.resize(kept);
}

}  // namespace

void prime_flags(std::span<const u64> values, std::span<u8> out) {
    if (out.size() < values.size()) throw std::invalid_argument("prime_flags: output too short");
    std::vector<u32> live;
    live.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (eligible(values[i])) {
            live.push_back(static_cast<u32>(i));
        } else {
            out[i] = arith::is_prime(values[i]) ? 1 : 0;
        }
    }
    // Narrow values first, wide ones after, so most groups take the short product.
    const auto wide_at = std::stable_partition(live.begin(), live.end(), [&](u32 i) { return values[i] < kWideFrom; });
    std::vector<u32> wide(wide_at, live.end());
    live.erase(wide_at, live.end());
    run_groups(values, live, out, sprp2_group<false>);
    run_groups(values, wide, out, sprp2_group<true>);
    live.insert(live.end(), wide.begin(), wide.end());

    // Survivors of base 2 are mostly prime: finish with the extra strong Lucas
    // test (base 2 plus this is BPSW, which has no counterexample below 2^64).
    std::vector<u32> rest;
    std::vector<u64> lucas_p;
    for (u32 i : live) {
        const u64 p = lucas_parameter(values[i]);
        if (p == 0) {
            out[i] = arith::is_prime(values[i]) ? 1 : 0;
        } else {
            rest.push_back(i);
            lucas_p.push_back(p);
        }
    }
    alignas(64) u64 buf[kGroup];
    alignas(64) u64 pbuf[kGroup];
    u8 pass[kGroup];
    for (std::size_t g = 0; g < rest.size(); g += kGroup) {
        const std::size_t cnt = std::min<std::size_t>(kGroup, rest.size() - g);
        for (std::size_t j = 0; j < kGroup; ++j) {
            const std::size_t t = g + std::min(j, cnt - 1);
            buf[j] = values[rest[t]];
            pbuf[j] = lucas_p[t];
        }
        if (buf[cnt - 1] >= kWideFrom || buf[0] >= kWideFrom) {
            lucas_group<true>(buf, pbuf, pass);
        } else {
            lucas_group<false>(buf, pbuf, pass);
        }
        for (std::size_t j = 0; j < cnt; ++j) out[rest[g + j]] = pass[j];
    }
}

}  // namespace es::kernels::avx512
