#pragma once

#include <functional>
#include <vector>

#include "es/arith.hpp"
#include "es/common.hpp"

namespace es::solutions {

// One solution (n1, n2, n3) of 4/n = 1/n1 + 1/n2 + 1/n3.
struct SolutionTriple {
    u64 n1 = 0;
    u64 n2 = 0;
    u64 n3 = 0;

    friend auto operator<=>(const SolutionTriple&, const SolutionTriple&) = default;
};

// Exact rational check of 4/n = 1/n1 + 1/n2 + 1/n3.
bool solves(u64 n, const SolutionTriple& t);

// Distinct orderings of a triple: 6, 3 or 1.
unsigned permutation_count(const SolutionTriple& t);

// All solutions for n, stored once each as n1 <= n2 <= n3.
struct SolutionSet {
    u64 n = 0;
    std::vector<SolutionTriple> canonical;  // sorted lexicographically
    u64 ordered_count = 0;                  // f(n)

    u64 unordered_count() const { return canonical.size(); }
};

// Exhaustive search. For each n1 in (n/4, 3n/4] the remainder A/B = 4/n - 1/n1
// is written in lowest terms; then (A n2 - B)(A n3 - B) = B^2, so n2 and n3
// come from divisors D <= B of B^2 with D = -B (mod A).
// Throws CapacityError if a denominator would not fit 64 bits.
SolutionSet enumerate_solutions(u64 n);
SolutionSet enumerate_solutions(u64 n, const arith::ArithTables& tables);

// Ordered solution counts for a prime p, split by how many denominators p divides.
struct TypeSplit {
    u64 p = 0;
    u64 f1 = 0;     // exactly one denominator divisible by p
    u64 f2 = 0;     // exactly two
    u64 other = 0;  // none or all three

    u64 total() const { return f1 + f2 + other; }
    friend bool operator==(const TypeSplit&, const TypeSplit&) = default;
};

enum class SolutionType { TypeI, TypeII, Other };

// Throws DomainError if t does not solve 4/p.
SolutionType classify(u64 p, const SolutionTriple& t);

// Ordered counts by type; throws DomainError if p is not prime.
TypeSplit type_split(u64 p);
TypeSplit type_split(u64 p, const arith::ArithTables& tables);

// Callback form used by the sweeps: visits every canonical triple for n.
void for_each_solution(u64 n, const arith::ArithTables& tables,
                       const std::function<void(const SolutionTriple&)>& visit);

}  // namespace es::solutions
