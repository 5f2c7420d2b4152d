#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "es/arith.hpp"
#include "es/common.hpp"
#include "es/erdos_straus.hpp"

namespace es::meanvalue {

struct PrimeSums {
    u64 x = 0;
    u64 prime_count = 0;  // primes p < x
    u64 sum_f1 = 0;
    u64 sum_f2 = 0;
    u64 min_f = 0;  // smallest f(p) over p < x
    u64 min_f_prime = 0;

    friend bool operator==(const PrimeSums&, const PrimeSums&) = default;
};

// Per-prime split; replaceable so tests can inject faults.
using SplitFn = std::function<solutions::TypeSplit(u64 p, const arith::ArithTables& tables)>;

// Sums of f1(p), f2(p) over primes p < x, x >= 3. Throws InvariantViolation if
// some f(p) = 0 or an odd prime has a solution counted by neither f1 nor f2.
PrimeSums prime_sums(u64 x, unsigned workers = 1, const SplitFn& split = {});
u64 sum_f1(u64 x, unsigned workers = 1);
u64 sum_f2(u64 x, unsigned workers = 1);

struct NamedValue {
    std::string name;
    double value = 0;
};

struct Ratio {
    std::string name;      // e.g. "f1_main"
    std::string sum;       // "sum_f1" or "sum_f2"
    std::string envelope;  // key into MeanValueReport::envelopes
    double value = 0;
};

// Natural logs throughout; c = 1 in the exp envelope (display choice).
struct MeanValueReport {
    PrimeSums sums;
    std::vector<NamedValue> envelopes;
    std::vector<Ratio> ratios;

    double envelope(const std::string& name) const;
    double ratio(const std::string& name) const;
};

MeanValueReport mean_value_report(const PrimeSums& sums);
MeanValueReport mean_value_report(u64 x, unsigned workers = 1);

// Dyadic block 2^i < a <= 2^{i+1}, 2^j < l <= 2^{j+1}; i = -1 holds a = 1 and
// j = -1 holds l = 1. Only pairs with a l <= x are counted.
struct WeightBlock {
    int i = 0;
    int j = 0;
    u64 pairs = 0;
    u64 divisor_sum = 0;    // sum of d(4 l a^2 + 1)
    double block_sum = 0;   // sum of the exact weighted terms
    double weight = 0;      // 1 / (1 + log2 x - i - j)
};

struct WeightSumReport {
    u64 x = 0;
    u64 pairs = 0;
    double direct_value = 0;    // sum over a l <= x of x d(4la^2+1) / (phi(4al) log(1 + x/(al)))
    double dyadic_value = 0;    // sum of block_sum
    double majorant_value = 0;  // x loglog x sum weight 2^{-i-j} divisor_sum
    std::vector<WeightBlock> blocks;  // ordered by (i, j), nonempty blocks only
};

// Requires x >= 16.
WeightSumReport weight_sum(u64 x, unsigned workers = 1);

// Closing chain with K = log2 x, i in [0, floor K], J_i = floor K - i:
//   double_sum    = sum_i sum_{j <= J_i} 1 / (1 + K - i - j)
//   harmonic      = sum_i H(J_i + 1)
//   log_majorant  = sum_i log2(J_i + 2)
//   closing       = (floor K + 1) log2(floor K + 2)
// Each line is summed in an order that makes line[k] <= line[k+1] exact in
// floating point.
struct FinalChain {
    u64 x = 0;
    double K = 0;
    std::array<double, 4> lines{};
    std::array<double, 3> ratios{};  // lines[k+1] / lines[k]
    double closing_scaled = 0;       // x log^4 x loglog x * closing
    double main_envelope = 0;     // x log^5 x (loglog x)^2
    double main_ratio = 0;
};

inline constexpr std::array<const char*, 4> kChainLineNames = {"double_sum", "harmonic", "log_majorant",
                                                               "closing"};

// Requires x >= 16.
FinalChain final_chain(u64 x);

}  // namespace es::meanvalue
