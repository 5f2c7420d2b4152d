#include "es/bilinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "es/kernels.hpp"
#include "es/primality.hpp"

namespace es::bilinear {

namespace {

// a^k, saturating at 2^64 - 1.
u64 saturating_pow(u64 a, unsigned k) {
    u128 v = 1;
    for (unsigned i = 0; i < k; ++i) {
        v *= a;
        if (v > std::numeric_limits<u64>::max()) return std::numeric_limits<u64>::max();
    }
    return static_cast<u64>(v);
}

u64 z_floor_of(double Z) {
    if (!(Z >= 2.0)) throw DomainError("Z must be at least 2");
    if (Z >= 1.8e19) throw CapacityError("Z exceeds 64 bits");
    return static_cast<u64>(std::floor(Z));
}

}  // namespace

u64 floor_power(u64 scale, double theta) {
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
    const double inv = 1.0 / theta;
    const double k = std::round(inv);
    if (std::fabs(inv - k) < 1e-9 && k >= 1 && k <= 64) {
        // Exact integer k-th root.
        const unsigned kk = static_cast<unsigned>(k);
        u64 z = static_cast<u64>(std::pow(static_cast<double>(scale), theta));
        while (z > 0 && saturating_pow(z, kk) > scale) --z;
        while (saturating_pow(z + 1, kk) <= scale) ++z;
        return z;
    }
    return static_cast<u64>(std::floor(std::pow(static_cast<double>(scale), theta)));
}

std::string_view case_name(CaseLabel c) {
    switch (c) {
        case CaseLabel::I: return "I";
        case CaseLabel::II: return "II";
        case CaseLabel::III: return "III";
        case CaseLabel::IV: return "IV";
    }
    return "?";
}

BcSplit split_bc(const arith::Factorization& f, double Z) {
    const u64 zf = z_floor_of(Z);
    BcSplit s;
    s.n = f.n;
    bool open = true;
    for (const auto& pp : f.factors) {
        u128 q = 1;
        for (unsigned e = 0; e < pp.exponent; ++e) q *= pp.prime;
        if (open && q <= zf / s.b) {
            s.b *= q;
            continue;
        }
        if (open) {
            open = false;
            s.least_prime_of_c = pp.prime;
        }
        s.omega_c += pp.exponent;
    }
    s.c = f.n / s.b;
    return s;
}

BcSplit split_bc(u128 n, double Z) {
    if (n == 0) throw DomainError("split_bc: n must be positive");
    z_floor_of(Z);
    return split_bc(arith::factorize(n), Z);
}

double BoxSpec::Z() const { return std::pow(static_cast<double>(scale()), theta); }

double BoxSpec::T() const {
    const double lw = std::log(static_cast<double>(scale()));
    return lw * std::log(lw);
}

bool BoxSpec::degenerate() const {
    // T >= Z^{1/2}  <=>  T^2 >= Z
    const double t = T();
    return t * t >= Z();
}

int BoxSpec::r0() const {
    const double t = T();
    if (!(t > 1.0)) return 0;
    return static_cast<int>(std::floor(std::log(Z()) / std::log(t)));
}

u64 BoxSpec::n_max() const {
    const u128 v = static_cast<u128>(8) * V * (static_cast<u128>(4) * W * W) + 1;
    if (V == 0 || W == 0 || (2 * static_cast<u128>(W)) > (u128{1} << 64) ||
        v > std::numeric_limits<u64>::max()) {
        throw CapacityError("4 l a^2 + 1 exceeds 64 bits for V = " + std::to_string(V) +
                            ", W = " + std::to_string(W));
    }
    return static_cast<u64>(v);
}

void BoxSpec::validate() const {
    if (V == 0 || W == 0) throw ConfigError("V and W must be positive");
    if (!(theta > 0.0 && theta <= 0.5)) throw ConfigError("theta must lie in (0, 1/2]");
    n_max();
    if (Z_floor() < 2) {
        throw ConfigError("Z = max(V, W)^theta = " + std::to_string(Z()) + " is below 2");
    }
    if (degenerate() && !allow_degenerate) {
        throw ConfigError("degenerate box: T = log W log log W = " + std::to_string(T()) +
                          " is not below Z^{1/2} = " + std::to_string(std::sqrt(Z())));
    }
}

CaseThresholds::CaseThresholds(const BoxSpec& box) : z_floor(box.Z_floor()) {
    const double t = box.T();
    t_floor = t > 0 ? static_cast<u64>(std::floor(t)) : 0;
}

CaseLabel CaseThresholds::label(u128 b, u128 pc) const {
    // p(c)^2 > Z, with c = 1 counted as p(c) = infinity.
    if (pc == 0 || pc > (u128{1} << 32) || pc * pc > z_floor) return CaseLabel::I;
    if (b * b <= z_floor) return CaseLabel::II;
    if (pc <= t_floor) return CaseLabel::III;
    return CaseLabel::IV;
}

CaseLabel classify_case(const BcSplit& split, const BoxSpec& box) {
    box.validate();
    return CaseThresholds(box).label(split.b, split.least_prime_of_c);
}

double box_envelope(const BoxSpec& box) {
    const double l = std::log(2.0 * static_cast<double>(box.scale()));
    return static_cast<double>(box.V) * static_cast<double>(box.W) * l * l * l * l;
}

double case_envelope(CaseLabel c, const BoxSpec& box, double eps) {
    const double vw = static_cast<double>(box.V) * static_cast<double>(box.W);
    const double s = static_cast<double>(box.scale());
    switch (c) {
        case CaseLabel::II: return vw * std::pow(s, -box.theta / 4 + eps);
        case CaseLabel::III: return vw * std::pow(s, -box.theta / 2 + 3 * eps);
        default: return box_envelope(box);
    }
}

unsigned s_p(u64 p, double Z) {
    const u64 zf = z_floor_of(Z);
    if (!arith::is_prime(p)) throw DomainError("s_p: " + std::to_string(p) + " is not prime");
    if (static_cast<u128>(p) * p > zf) throw DomainError("s_p: p exceeds Z^{1/2}");
    // p^s > Z^{1/2}  <=>  p^{2s} > Z
    unsigned s = 1;
    u128 p2s = static_cast<u128>(p) * p;
    while (p2s <= zf) {
        p2s *= static_cast<u128>(p) * p;
        ++s;
    }
    return s;
}

unsigned case4_r(u64 p, double Z) {
    const u64 zf = z_floor_of(Z);
    if (p < 2) throw DomainError("case4_r: p must be at least 2");
    unsigned r = 0;
    u128 v = p;
    while (v <= zf) {
        ++r;
        v *= p;
    }
    return r;
}

bool omega_bound_check(const BcSplit& split, const BoxSpec& box, int r) {
    if (classify_case(split, box) != CaseLabel::IV) throw DomainError("omega_bound_check: split is not in Case IV");
    if (r < 2 || r > box.r0()) throw DomainError("omega_bound_check: r outside [2, r0]");
    const u64 pc = static_cast<u64>(split.least_prime_of_c);
    if (static_cast<int>(case4_r(pc, box.Z())) != r) {
        throw DomainError("omega_bound_check: p(c) is not in (Z^{1/(r+1)}, Z^{1/r}]");
    }
    const double bound = 3.0 * std::log(static_cast<double>(box.n_max())) / std::log(static_cast<double>(pc));
    return static_cast<double>(split.omega_c) <= bound;
}

Case2Tail case2_tail(double Z) {
    if (!(Z >= 4.0)) throw DomainError("case2_tail: Z must be at least 4");
    const u64 zf = z_floor_of(Z);
    Case2Tail out;
    out.Z = Z;
    const double inv_sqrt_z = 1.0 / std::sqrt(Z);
    for (u64 p : arith::primes_up_to(arith::isqrt(zf))) {
        const unsigned s = s_p(p, Z);
        u128 ps = 1;
        for (unsigned i = 0; i < s; ++i) ps *= p;
        const bool small = static_cast<u128>(p) * p * p * p <= zf;  // p <= Z^{1/4}
        Case2TailTerm t{p, s, 1.0 / static_cast<double>(ps),
                        small ? inv_sqrt_z : 1.0 / (static_cast<double>(p) * static_cast<double>(p))};
        out.dominated = out.dominated && t.term <= t.bound;
        out.s_at_least_2 = out.s_at_least_2 && s >= 2;
        out.power_within_Z = out.power_within_Z && ps <= zf;
        // Plain left-to-right sums in the same order keep tail <= majorant exact.
        out.tail += t.term;
        out.majorant += t.bound;
        out.terms.push_back(t);
    }
    return out;
}

Lemma6Result lemma6_sum(double Z, int r, u64 n_max) {
    if (!(Z >= 16.0)) throw DomainError("lemma6_sum: Z must be at least 16");
    const double lz = std::log(Z);
    if (r < 1 || r > lz / std::log(lz)) throw DomainError("lemma6_sum: r must lie in [1, log Z / log log Z]");
    if (n_max < 2) throw DomainError("lemma6_sum: n_max must be at least 2");
    const u64 zf = z_floor_of(Z);
    const bool z_integral = static_cast<double>(zf) == Z;

    // y = Z^{1/r}: q <= y  <=>  q^r <= Z  <=>  q^r <= floor(Z).
    auto smooth_prime = [&](u64 q) { return saturating_pow(q, static_cast<unsigned>(r)) <= zf; };
    // n >= Z^{1/2}  <=>  n^2 >= Z
    auto large_enough = [&](u64 n) {
        const u128 n2 = static_cast<u128>(n) * n;
        return z_integral ? n2 >= zf : n2 > zf;
    };

    Lemma6Result out;
    out.Z = Z;
    out.r = r;
    out.n_max = n_max;

    const auto tables = arith::sieve_tables(n_max);
    std::vector<u32> gpf(n_max + 1, 1);
    for (u64 n = 2; n <= n_max; ++n) {
        const u32 p = tables.least_prime_factor(n);
        gpf[n] = std::max(p, gpf[n / p]);
    }
    std::vector<double> head_terms, kept_terms;
    for (u64 n = 1; n <= n_max; ++n) {
        if (n > 1 && !smooth_prime(gpf[n])) continue;
        const double d = tables.divisor_count(n);
        (large_enough(n) ? kept_terms : head_terms).push_back(d * d / static_cast<double>(n));
    }
    out.lhs_truncated = kernels::compensated_sum(kept_terms);

    // Whole smooth series: prod_{q <= y} (1 + 1/q) / (1 - 1/q)^3.
    std::vector<u32> ys;
    for (u32 q : arith::primes_up_to(zf)) {
        if (smooth_prime(q)) ys.push_back(q);
    }
    double log_full = 0;
    for (u32 q : ys) {
        const double x = 1.0 / q;
        log_full += std::log1p(x) - 3.0 * std::log1p(-x);
    }
    // Head terms with n < Z^{1/2} all lie below n_max once n_max^2 >= Z.
    if (!large_enough(n_max)) throw DomainError("lemma6_sum: n_max must be at least Z^{1/2}");
    out.lhs_full = std::exp(log_full) - kernels::compensated_sum(head_terms);

    // Rankin: sum_{n > N, smooth} d^2/n <= N^{-sigma} prod (1 + x)/(1 - x)^3, x = q^{sigma - 1}.
    auto rankin = [&](double sigma) {
        double lg = -sigma * std::log(static_cast<double>(n_max));
        for (u32 q : ys) {
            const double x = std::pow(static_cast<double>(q), sigma - 1.0);
            lg += std::log1p(x) - 3.0 * std::log1p(-x);
        }
        return lg;
    };
    double best_sigma = 0, best = rankin(0);
    for (int i = 1; i < 400; ++i) {
        const double sigma = i / 400.0;
        const double v = rankin(sigma);
        if (v < best) {
            best = v;
            best_sigma = sigma;
        }
    }
    out.tail_sigma = best_sigma;
    out.tail_bound = std::exp(best);

    double four_over_p = 0;
    for (u32 q : arith::primes_up_to(zf)) four_over_p += 4.0 / q;
    out.rhs = std::exp(four_over_p - (r / 10.0) * std::log(static_cast<double>(r)));
    out.ratio = out.lhs_full / out.rhs;
    return out;
}

}  // namespace es::bilinear
