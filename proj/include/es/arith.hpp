#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "es/common.hpp"

namespace es::arith {

struct PrimePower {
    u128 prime;
    unsigned exponent;

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// Canonical prime-power decomposition; primes strictly increasing, empty iff n == 1.
struct Factorization {
    u128 n = 1;
    std::vector<PrimePower> factors;

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

// Sieved arithmetic tables for 0..limit. Entries 0 and 1 hold 0 / 1 placeholders.
class ArithTables {
public:
    ArithTables() = default;

    u64 limit() const { return limit_; }
    bool has_phi() const { return !phi_.empty(); }

    u32 least_prime_factor(u64 n) const { return lpf_[n]; }
    u32 divisor_count(u64 n) const { return dcount_[n]; }
    u32 phi(u64 n) const { return phi_[n]; }
    bool is_prime(u64 n) const { return n >= 2 && lpf_[n] == n; }

    std::span<const u32> primes() const { return primes_; }
    std::span<const u32> lpf_table() const { return lpf_; }
    std::span<const u32> divisor_table() const { return dcount_; }

    // Binary cache: magic, format version, limit, phi flag, then the arrays.
    void save(const std::filesystem::path& file) const;
    // Returns nullopt on a missing file, bad magic, or a different limit / phi flag.
    static std::optional<ArithTables> load(const std::filesystem::path& file, u64 limit, bool with_phi);

private:
    friend ArithTables sieve_tables(u64 limit, bool with_phi, u64 memory_budget);

    u64 limit_ = 0;
    std::vector<u32> lpf_;
    std::vector<u32> dcount_;
    std::vector<u32> phi_;
    std::vector<u32> primes_;
};

inline constexpr u64 kDefaultMemoryBudget = u64{2} << 30;

// Linear sieve; throws DomainError for limit < 2 and CapacityError past the budget.
ArithTables sieve_tables(u64 limit, bool with_phi = false, u64 memory_budget = kDefaultMemoryBudget);

// Primes up to limit (simple Eratosthenes; used where full tables are not needed).
std::vector<u32> primes_up_to(u64 limit);

Factorization factorize(u128 n);
Factorization factorize(u128 n, const ArithTables& tables);

u128 divisor_count(const Factorization& f);
u128 euler_phi(const Factorization& f);
unsigned big_omega(const Factorization& f);

// p(n) and P(n); both reject n < 2.
u128 least_prime_factor(u128 n);
u128 greatest_prime_factor(u128 n);

// Psi(x, y): count of n <= x whose prime factors are all <= y (n = 1 included).
u64 smooth_count(u64 x, double y);

// Sum of d(n)^2 / n for n <= x, compensated floating point.
double d2_over_n_partial(u64 x);
double d2_over_n_partial(const ArithTables& tables, u64 x);
// Same sum in exact rational arithmetic, rounded once. x <= 10^4.
double d2_over_n_exact(u64 x);

// Sum of d(n)^2 for n <= x.
u64 d2_partial(u64 x);
u64 d2_partial(const ArithTables& tables, u64 x);

}  // namespace es::arith
