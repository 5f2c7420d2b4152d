#include "es/erdos_straus.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "es/primality.hpp"

namespace es::solutions {

bool solves(u64 n, const SolutionTriple& t) {
    if (n == 0 || t.n1 == 0 || t.n2 == 0 || t.n3 == 0) return false;
    // 4 n1 n2 n3 == n (n2 n3 + n1 n3 + n1 n2), all in 128 bits with overflow checks.
    u128 lhs, pair12, pair13, pair23, rhs;
    if (__builtin_mul_overflow(static_cast<u128>(t.n1) * t.n2, static_cast<u128>(4) * t.n3, &lhs)) {
        throw CapacityError("solves: product overflows 128 bits");
    }
    pair12 = static_cast<u128>(t.n1) * t.n2;
    pair13 = static_cast<u128>(t.n1) * t.n3;
    pair23 = static_cast<u128>(t.n2) * t.n3;
    const u128 sum = pair12 + pair13 + pair23;
    if (sum < pair12 || __builtin_mul_overflow(sum, static_cast<u128>(n), &rhs)) {
        throw CapacityError("solves: product overflows 128 bits");
    }
    return lhs == rhs;
}

unsigned permutation_count(const SolutionTriple& t) {
    if (t.n1 == t.n2 && t.n2 == t.n3) return 1;
    if (t.n1 == t.n2 || t.n2 == t.n3 || t.n1 == t.n3) return 3;
    return 6;
}

namespace {

struct PrimeExp {
    u64 prime;
    unsigned exp;  // exponent in B^2
};

class DivisorWalker {
public:
    DivisorWalker(u64 b, u64 a, u64 n1, const std::vector<PrimeExp>& primes,
                  const std::function<void(const SolutionTriple&)>& visit)
        : b_(b), a_(a), n1_(n1), target_((a - b % a) % a), primes_(primes), visit_(visit) {}

    void run() { walk(0, 1); }

private:
    void walk(std::size_t idx, u64 d) {
        if (idx == primes_.size()) {
            if (a_ == 1 || d % a_ == target_) emit(d);
            return;
        }
        const u64 q = primes_[idx].prime;
        const unsigned e = primes_[idx].exp;
        for (unsigned j = 0;; ++j) {
            walk(idx + 1, d);
            if (j == e || d > b_ / q) break;
            d *= q;
        }
    }

    void emit(u64 d) {
        const u128 n2 = (static_cast<u128>(b_) + d) / a_;
        if (n2 < n1_) return;
        const u128 b = b_;
        const u128 n3 = (b + b * b / d) / a_;
        if (n3 > std::numeric_limits<u64>::max()) throw CapacityError("solution denominator exceeds 64 bits");
        visit_(SolutionTriple{n1_, static_cast<u64>(n2), static_cast<u64>(n3)});
    }

    u64 b_, a_, n1_, target_;
    const std::vector<PrimeExp>& primes_;
    const std::function<void(const SolutionTriple&)>& visit_;
};

void add_factors(u64 m, const arith::ArithTables& tables, std::vector<u64>& primes) {
    while (m > 1) {
        const u32 p = tables.least_prime_factor(m);
        primes.push_back(p);
        while (m % p == 0) m /= p;
    }
}

}  // namespace

void for_each_solution(u64 n, const arith::ArithTables& tables,
                       const std::function<void(const SolutionTriple&)>& visit) {
    if (n == 0) throw DomainError("enumerate_solutions: n must be positive");
    if (n > tables.limit()) throw CapacityError("enumerate_solutions: sieve tables do not cover n");
    if (n >= (u64{1} << 32)) throw CapacityError("enumerate_solutions: n must be below 2^32");
    std::vector<u64> n_primes;
    add_factors(n, tables, n_primes);
    std::vector<u64> cand;
    std::vector<PrimeExp> b_primes;
    const u64 lo = n / 4 + 1;
    const u64 hi = 3 * n / 4;
    for (u64 n1 = lo; n1 <= hi; ++n1) {
        const u64 num = 4 * n1 - n;
        const u64 den = n * n1;
        const u64 g = std::gcd(num, den);
        const u64 a = num / g;
        const u64 b = den / g;
        cand = n_primes;
        add_factors(n1, tables, cand);
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        b_primes.clear();
        u64 rest = b;
        // Larger primes first: the walk prunes once the divisor exceeds b.
        for (auto it = cand.rbegin(); it != cand.rend(); ++it) {
            unsigned e = 0;
            while (rest % *it == 0) {
                rest /= *it;
                ++e;
            }
            if (e > 0) b_primes.push_back({*it, 2 * e});
        }
        DivisorWalker(b, a, n1, b_primes, visit).run();
    }
}

SolutionSet enumerate_solutions(u64 n, const arith::ArithTables& tables) {
    SolutionSet set;
    set.n = n;
    for_each_solution(n, tables, [&](const SolutionTriple& t) {
        set.canonical.push_back(t);
        set.ordered_count += permutation_count(t);
    });
    std::sort(set.canonical.begin(), set.canonical.end());
    return set;
}

SolutionSet enumerate_solutions(u64 n) {
    if (n == 0) throw DomainError("enumerate_solutions: n must be positive");
    return enumerate_solutions(n, arith::sieve_tables(std::max<u64>(n, 2)));
}

SolutionType classify(u64 p, const SolutionTriple& t) {
    if (!solves(p, t)) throw DomainError("classify: triple does not solve 4/p");
    const int k = (t.n1 % p == 0) + (t.n2 % p == 0) + (t.n3 % p == 0);
    if (k == 1) return SolutionType::TypeI;
    if (k == 2) return SolutionType::TypeII;
    return SolutionType::Other;
}

TypeSplit type_split(u64 p, const arith::ArithTables& tables) {
    if (!arith::is_prime(p)) throw DomainError("type_split: " + std::to_string(p) + " is not prime");
    TypeSplit split;
    split.p = p;
    for_each_solution(p, tables, [&](const SolutionTriple& t) {
        const int k = (t.n1 % p == 0) + (t.n2 % p == 0) + (t.n3 % p == 0);
        const unsigned w = permutation_count(t);
        if (k == 1) {
            split.f1 += w;
        } else if (k == 2) {
            split.f2 += w;
        } else {
            split.other += w;
        }
    });
    return split;
}

TypeSplit type_split(u64 p) {
    if (!arith::is_prime(p)) throw DomainError("type_split: " + std::to_string(p) + " is not prime");
    return type_split(p, arith::sieve_tables(std::max<u64>(p, 2)));
}

}  // namespace es::solutions
