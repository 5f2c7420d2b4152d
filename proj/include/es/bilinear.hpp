#pragma once

#include <array>
#include <string_view>
#include <vector>

#include "es/arith.hpp"
#include "es/common.hpp"

namespace es::bilinear {

// n = b * c where b is the longest run of the smallest prime powers of n with
// product <= Z and c is the rest.
struct BcSplit {
    u128 n = 1;
    u128 b = 1;
    u128 c = 1;
    u128 least_prime_of_c = 0;  // 0 iff c == 1
    unsigned omega_c = 0;       // Omega(c)
};

// Throws DomainError for n == 0 or Z < 2.
BcSplit split_bc(u128 n, double Z);
BcSplit split_bc(const arith::Factorization& f, double Z);

// Largest integer <= scale^theta, exact when 1/theta is an integer.
u64 floor_power(u64 scale, double theta);

enum class CaseLabel { I, II, III, IV };
inline constexpr std::array<CaseLabel, 4> kAllCases = {CaseLabel::I, CaseLabel::II, CaseLabel::III,
                                                      CaseLabel::IV};
std::string_view case_name(CaseLabel c);

// Dyadic box V < l <= 2V, W < a <= 2W with split exponent theta.
// Z, T and r0 are built from scale = max(V, W): for W < V the roles of l and a
// are exchanged.
struct BoxSpec {
    u64 V = 1;
    u64 W = 1;
    double theta = 1.0 / 20;
    // Accept boxes where log W log log W >= Z^{1/2}. Case IV is then empty and
    // Case III takes every p(c) <= Z^{1/2} with b > Z^{1/2}.
    bool allow_degenerate = false;

    u64 scale() const { return V > W ? V : W; }
    bool linear_branch() const { return W < V; }
    double Z() const;
    u64 Z_floor() const { return floor_power(scale(), theta); }
    double T() const;
    bool degenerate() const;
    // floor(log Z / log T); 0 when T <= 1.
    int r0() const;
    // Largest 4 l a^2 + 1 in the box.
    u64 n_max() const;
    u64 pair_count() const { return V * W; }

    // Throws ConfigError (theta, Z < 2, degeneracy) or CapacityError (n_max >= 2^64).
    void validate() const;
};

// Integer thresholds derived from a BoxSpec; all case tests are exact.
struct CaseThresholds {
    u64 z_floor = 0;  // floor(Z)
    u64 t_floor = 0;  // floor(T)

    explicit CaseThresholds(const BoxSpec& box);
    // pc = least prime of c, 0 when c = 1.
    CaseLabel label(u128 b, u128 pc) const;
};

CaseLabel classify_case(const BcSplit& split, const BoxSpec& box);

inline constexpr double kDisplayEpsilon = 0.05;

// V W log^4(2 S) with S = box.scale(); the whole-box envelope and that of Cases I and IV.
double box_envelope(const BoxSpec& box);
// Per-case envelope: Cases II and III use V W S^{-theta/4 + eps} and
// V W S^{-theta/2 + 3 eps}.
double case_envelope(CaseLabel c, const BoxSpec& box, double eps = kDisplayEpsilon);

// Smallest s with p^s > Z^{1/2}. Throws DomainError unless p is prime and p <= Z^{1/2}.
unsigned s_p(u64 p, double Z);

// r with Z^{1/(r+1)} < p <= Z^{1/r}, i.e. the largest r with p^r <= Z.
unsigned case4_r(u64 p, double Z);

// Omega(c) <= 3 log(n_max) / log p(c). Requires a Case IV split whose p(c) lies
// in (Z^{1/(r+1)}, Z^{1/r}] with 2 <= r <= r0; DomainError otherwise.
bool omega_bound_check(const BcSplit& split, const BoxSpec& box, int r);

struct Case2TailTerm {
    u64 p;
    unsigned s;
    double term;   // p^{-s}
    double bound;  // Z^{-1/2} for p <= Z^{1/4}, else p^{-2}
};

struct Case2Tail {
    double Z = 0;
    double tail = 0;
    double majorant = 0;
    bool dominated = true;     // term <= bound for every p
    bool s_at_least_2 = true;  // s_p >= 2 for every p
    bool power_within_Z = true;  // p^{s_p} <= Z for every p
    std::vector<Case2TailTerm> terms;
};

// Throws DomainError for Z < 4.
Case2Tail case2_tail(double Z);

// Sum of d(n)^2/n over n >= Z^{1/2} with P(n) <= Z^{1/r}.
struct Lemma6Result {
    double Z = 0;
    int r = 1;
    u64 n_max = 0;
    double lhs_truncated = 0;  // n <= n_max
    double lhs_full = 0;       // whole series, via the Euler product
    double tail_bound = 0;     // Rankin bound on the n > n_max part
    double tail_sigma = 0;
    double rhs = 0;            // exp(sum_{p<=Z} 4/p - (r/10) log r)
    double ratio = 0;          // lhs_full / rhs
};

// Requires 1 <= r <= log Z / log log Z and Z >= 16.
Lemma6Result lemma6_sum(double Z, int r, u64 n_max);

struct CaseTally {
    u64 pairs = 0;
    u64 sum = 0;  // sum of d(4 l a^2 + 1)
};

struct BoxResult {
    BoxSpec box;
    u64 total = 0;
    std::array<CaseTally, 4> cases{};
    u64 case4_checked = 0;
    u64 case4_omega_failures = 0;        // Omega(c) > 3 log(n_max) / log p(c)
    u64 case4_omega_log_w_failures = 0;  // Omega(c) > 3 log W / log p(c)

    friend bool operator==(const BoxResult& x, const BoxResult& y) {
        return x.total == y.total && x.case4_checked == y.case4_checked &&
               x.case4_omega_failures == y.case4_omega_failures &&
               x.case4_omega_log_w_failures == y.case4_omega_log_w_failures &&
               std::equal(x.cases.begin(), x.cases.end(), y.cases.begin(), [](const auto& a, const auto& b) {
                   return a.pairs == b.pairs && a.sum == b.sum;
               });
    }
};

enum class SweepMethod {
    Sieve,      // sieve each l-row by primes below Q, finish the cofactor
    Factorize,  // factorize every 4 l a^2 + 1 on its own (reference)
};

// Sum of d(4 l a^2 + 1) over the box, split by case. Deterministic for any
// worker count.
BoxResult sweep_box(const BoxSpec& box, SweepMethod method = SweepMethod::Sieve, unsigned workers = 1);

// Plain sum over the box (no case split); uses the sieve.
u64 bilinear_divisor_sum(u64 V, u64 W, unsigned workers = 1);

}  // namespace es::bilinear
