#include "es/arith.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "es/kernels.hpp"
#include "es/primality.hpp"

namespace es::arith {

namespace {

constexpr char kTableMagic[8] = {'E', 'S', 'A', 'R', 'I', 'T', 'H', '\0'};
constexpr u32 kTableFormat = 1;

// Trial division handles primes below this bound; the cofactor goes to MR / rho.
constexpr u32 kTrialBound = 1 << 12;

const std::vector<u32>& trial_primes() {
    static const std::vector<u32> primes = primes_up_to(kTrialBound);
    return primes;
}

void split_cofactor(u128 m, std::map<u128, unsigned>& out) {
    if (m == 1) return;
    if (is_prime(m)) {
        ++out[m];
        return;
    }
    const u128 d = pollard_brent(m);
    split_cofactor(d, out);
    split_cofactor(m / d, out);
}

Factorization finish(u128 n, std::vector<PrimePower> small, u128 cofactor) {
    Factorization f;
    f.n = n;
    f.factors = std::move(small);
    if (cofactor > 1) {
        std::map<u128, unsigned> big;
        split_cofactor(cofactor, big);
        for (const auto& [p, e] : big) f.factors.push_back({p, e});
    }
    std::sort(f.factors.begin(), f.factors.end(), [](const PrimePower& a, const PrimePower& b) { return a.prime < b.prime; });
    return f;
}

template <typename Int>
u128 strip_trial(Int m, std::span<const u32> primes, u32 bound, std::vector<PrimePower>& out) {
    for (u32 p : primes) {
        if (p > bound) break;
        if (static_cast<u128>(p) * p > m) break;
        if (m % p != 0) continue;
        unsigned e = 0;
        do {
            m /= p;
            ++e;
        } while (m % p == 0);
        out.push_back({p, e});
    }
    return m;
}

u128 trial_divide(u128 n, std::span<const u32> primes, u32 bound, std::vector<PrimePower>& out) {
    if ((n >> 64) != 0) return strip_trial<u128>(n, primes, bound, out);
    return strip_trial<u64>(static_cast<u64>(n), primes, bound, out);
}

}  // namespace

std::vector<u32> primes_up_to(u64 limit) {
    std::vector<u32> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(limit + 1, false);
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<u32>(i));
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return primes;
}

ArithTables sieve_tables(u64 limit, bool with_phi, u64 memory_budget) {
    if (limit < 2) throw DomainError("sieve limit must be at least 2");
    if (limit >= (u64{1} << 32)) throw CapacityError("sieve limit must be below 2^32");
    const u64 bytes_per_entry = 4 + 4 + 1 + (with_phi ? 4 : 0);
    if ((limit + 1) > memory_budget / bytes_per_entry) {
        throw CapacityError("sieve tables up to " + std::to_string(limit) + " exceed the memory budget of " +
                            std::to_string(memory_budget) + " bytes");
    }
    ArithTables t;
    t.limit_ = limit;
    t.lpf_.assign(limit + 1, 0);
    t.dcount_.assign(limit + 1, 0);
    std::vector<u8> lpf_exp(limit + 1, 0);
    if (with_phi) t.phi_.assign(limit + 1, 0);
    t.dcount_[1] = 1;
    t.lpf_[1] = 1;
    if (with_phi) {
        t.phi_[1] = 1;
    }
    for (u64 i = 2; i <= limit; ++i) {
        if (t.lpf_[i] == 0) {
            t.lpf_[i] = static_cast<u32>(i);
            t.dcount_[i] = 2;
            lpf_exp[i] = 1;
            if (with_phi) t.phi_[i] = static_cast<u32>(i - 1);
            t.primes_.push_back(static_cast<u32>(i));
        }
        const u32 li = t.lpf_[i];
        for (u32 p : t.primes_) {
            if (p > li) break;
            const u64 ip = i * p;
            if (ip > limit) break;
            t.lpf_[ip] = p;
            if (p == li) {
                lpf_exp[ip] = static_cast<u8>(lpf_exp[i] + 1);
                t.dcount_[ip] = t.dcount_[i] / (lpf_exp[i] + 1u) * (lpf_exp[i] + 2u);
                if (with_phi) t.phi_[ip] = t.phi_[i] * p;
            } else {
                lpf_exp[ip] = 1;
                t.dcount_[ip] = t.dcount_[i] * 2;
                if (with_phi) t.phi_[ip] = t.phi_[i] * (p - 1);
            }
        }
    }
    return t;
}

void ArithTables::save(const std::filesystem::path& file) const {
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write table cache " + tmp);
        const u8 phi_flag = has_phi() ? 1 : 0;
        const u64 nprimes = primes_.size();
        out.write(kTableMagic, sizeof kTableMagic);
        out.write(reinterpret_cast<const char*>(&kTableFormat), sizeof kTableFormat);
        out.write(reinterpret_cast<const char*>(&limit_), sizeof limit_);
        out.write(reinterpret_cast<const char*>(&phi_flag), sizeof phi_flag);
        out.write(reinterpret_cast<const char*>(lpf_.data()), static_cast<std::streamsize>(lpf_.size() * 4));
        out.write(reinterpret_cast<const char*>(dcount_.data()), static_cast<std::streamsize>(dcount_.size() * 4));
        if (phi_flag) out.write(reinterpret_cast<const char*>(phi_.data()), static_cast<std::streamsize>(phi_.size() * 4));
        out.write(reinterpret_cast<const char*>(&nprimes), sizeof nprimes);
        out.write(reinterpret_cast<const char*>(primes_.data()), static_cast<std::streamsize>(nprimes * 4));
        if (!out) throw std::runtime_error("short write to table cache " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

std::optional<ArithTables> ArithTables::load(const std::filesystem::path& file, u64 limit, bool with_phi) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    u32 format = 0;
    u64 stored_limit = 0;
    u8 phi_flag = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&format), sizeof format);
    in.read(reinterpret_cast<char*>(&stored_limit), sizeof stored_limit);
    in.read(reinterpret_cast<char*>(&phi_flag), sizeof phi_flag);
    if (!in || std::memcmp(magic, kTableMagic, sizeof magic) != 0 || format != kTableFormat) return std::nullopt;
    if (stored_limit != limit || (phi_flag != 0) != with_phi) return std::nullopt;
    ArithTables t;
    t.limit_ = limit;
    t.lpf_.resize(limit + 1);
    t.dcount_.resize(limit + 1);
    in.read(reinterpret_cast<char*>(t.lpf_.data()), static_cast<std::streamsize>(t.lpf_.size() * 4));
    in.read(reinterpret_cast<char*>(t.dcount_.data()), static_cast<std::streamsize>(t.dcount_.size() * 4));
    if (with_phi) {
        t.phi_.resize(limit + 1);
        in.read(reinterpret_cast<char*>(t.phi_.data()), static_cast<std::streamsize>(t.phi_.size() * 4));
    }
    u64 nprimes = 0;
    in.read(reinterpret_cast<char*>(&nprimes), sizeof nprimes);
    if (!in || nprimes > limit) return std::nullopt;
    t.primes_.resize(nprimes);
    in.read(reinterpret_cast<char*>(t.primes_.data()), static_cast<std::streamsize>(nprimes * 4));
    if (!in) return std::nullopt;
    return t;
}

Factorization factorize(u128 n) {
    if (n == 0) throw DomainError("factorize: n must be positive");
    std::vector<PrimePower> small;
    const u128 rest = trial_divide(n, trial_primes(), kTrialBound, small);
    return finish(n, std::move(small), rest);
}

Factorization factorize(u128 n, const ArithTables& tables) {
    if (n == 0) throw DomainError("factorize: n must be positive");
    if (n <= tables.limit()) {
        Factorization f;
        f.n = n;
        u64 m = static_cast<u64>(n);
        while (m > 1) {
            const u32 p = tables.least_prime_factor(m);
            unsigned e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            f.factors.push_back({p, e});
        }
        return f;
    }
    std::vector<PrimePower> small;
    const u128 rest = trial_divide(n, tables.primes(), kTrialBound, small);
    return finish(n, std::move(small), rest);
}

u128 divisor_count(const Factorization& f) {
    u128 d = 1;
    for (const auto& pp : f.factors) d *= pp.exponent + 1;
    return d;
}

u128 euler_phi(const Factorization& f) {
    u128 phi = 1;
    for (const auto& pp : f.factors) {
        phi *= pp.prime - 1;
        for (unsigned i = 1; i < pp.exponent; ++i) phi *= pp.prime;
    }
    return phi;
}

unsigned big_omega(const Factorization& f) {
    unsigned total = 0;
    for (const auto& pp : f.factors) total += pp.exponent;
    return total;
}

u128 least_prime_factor(u128 n) {
    if (n < 2) throw DomainError("p(n) is undefined for n < 2");
    return factorize(n).factors.front().prime;
}

u128 greatest_prime_factor(u128 n) {
    if (n < 2) throw DomainError("P(n) is undefined for n < 2");
    return factorize(n).factors.back().prime;
}

namespace {

// Numbers <= x built from the first k primes.
u64 psi_rec(u64 x, std::size_t k, const std::vector<u32>& primes) {
    if (k == 0 || x < 2) return 1;
    // Drop primes larger than x.
    if (primes[k - 1] > x) k = static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.begin() + k, x) - primes.begin());
    if (k == 0) return 1;
    if (k == 1) {
        // Powers of two (or of the single prime) up to x, plus 1.
        u64 c = 1;
        for (u64 v = primes[0]; v <= x; v *= primes[0]) {
            ++c;
            if (v > x / primes[0]) break;
        }
        return c;
    }
    return psi_rec(x, k - 1, primes) + psi_rec(x / primes[k - 1], k, primes);
}

}  // namespace

u64 smooth_count(u64 x, double y) {
    if (x < 1) throw DomainError("smooth_count: x must be positive");
    if (!(y >= 1.0)) throw DomainError("smooth_count: y must be at least 1");
    if (y >= static_cast<double>(x)) return x;
    const u64 ybound = static_cast<u64>(std::floor(y));
    if (ybound < 2) return 1;
    const std::vector<u32> primes = primes_up_to(ybound);
    if (primes.size() > 64 && x <= (u64{1} << 27)) {
        // Dense case: largest-prime-factor sieve.
        std::vector<u32> gpf(x + 1, 0);
        for (u64 p = 2; p <= x; ++p) {
            if (gpf[p] != 0) continue;
            for (u64 j = p; j <= x; j += p) gpf[j] = static_cast<u32>(p);
        }
        u64 count = 1;
        for (u64 n = 2; n <= x; ++n) count += gpf[n] <= ybound ? 1 : 0;
        return count;
    }
    return psi_rec(x, primes.size(), primes);
}

double d2_over_n_partial(const ArithTables& tables, u64 x) {
    if (x < 1) throw DomainError("d2_over_n_partial: x must be positive");
    if (x > tables.limit()) throw CapacityError("d2_over_n_partial: x exceeds the sieve limit");
    // Fixed chunking keeps the rounding independent of how the work is scheduled.
    constexpr u64 kChunk = u64{1} << 16;
    std::vector<double> partials;
    const auto table = tables.divisor_table();
    for (u64 lo = 1; lo <= x; lo += kChunk) {
        const u64 hi = std::min(x, lo + kChunk - 1);
        partials.push_back(kernels::sum_d2_over_n(table.subspan(lo, hi - lo + 1), lo));
    }
    return kernels::compensated_sum(partials);
}

double d2_over_n_partial(u64 x) {
    if (x < 1) throw DomainError("d2_over_n_partial: x must be positive");
    return d2_over_n_partial(sieve_tables(std::max<u64>(x, 2)), x);
}

double d2_over_n_exact(u64 x) {
    if (x < 1) throw DomainError("d2_over_n_exact: x must be positive");
    if (x > 10000) throw CapacityError("exact d^2/n summation is limited to x <= 10^4");
    const ArithTables t = sieve_tables(std::max<u64>(x, 2));
    mpz_class lcm = 1;
    for (u64 n = 2; n <= x; ++n) mpz_lcm_ui(lcm.get_mpz_t(), lcm.get_mpz_t(), static_cast<unsigned long>(n));
    mpz_class num = 0;
    mpz_class term;
    for (u64 n = 1; n <= x; ++n) {
        mpz_divexact_ui(term.get_mpz_t(), lcm.get_mpz_t(), static_cast<unsigned long>(n));
        const unsigned long d = t.divisor_count(n);
        term *= d * d;
        num += term;
    }
    mpq_class q(num, lcm);
    q.canonicalize();
    return q.get_d();
}

u64 d2_partial(const ArithTables& tables, u64 x) {
    if (x < 1) throw DomainError("d2_partial: x must be positive");
    if (x > tables.limit()) throw CapacityError("d2_partial: x exceeds the sieve limit");
    u64 total = 0;
    for (u64 n = 1; n <= x; ++n) {
        const u64 d = tables.divisor_count(n);
        total += d * d;
    }
    return total;
}

u64 d2_partial(u64 x) {
    if (x < 1) throw DomainError("d2_partial: x must be positive");
    return d2_partial(sieve_tables(std::max<u64>(x, 2)), x);
}

}  // namespace es::arith
