#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference in
// es::kernels::scalar; vector variants live in es::kernels::avx2 and
// es::kernels::avx512 and are chosen once at runtime. Set ES_SIMD to
// "scalar", "avx2" or "avx512" to pin the choice (capped at what the CPU has).

#include <span>
#include <string_view>

#include "es/common.hpp"

namespace es::kernels {

enum class Isa { Scalar, Avx2, Avx512Ifma };

std::string_view isa_name(Isa isa);
Isa detected_isa();
Isa active_isa();
// Overrides the runtime choice (tests, benchmarks). Capped at detected_isa().
void force_isa(Isa isa);

// out[i] = 1 iff values[i] is prime. Exact for every 64-bit input.
void prime_flags(std::span<const u64> values, std::span<u8> out);

// Neumaier-compensated sum of d[i]^2 / (first + i).
double sum_d2_over_n(std::span<const u32> d, u64 first);

// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

namespace scalar {
void prime_flags(std::span<const u64> values, std::span<u8> out);
double sum_d2_over_n(std::span<const u32> d, u64 first);
double compensated_sum(std::span<const double> values);
}  // namespace scalar

namespace avx2 {
double sum_d2_over_n(std::span<const u32> d, u64 first);
double compensated_sum(std::span<const double> values);
}  // namespace avx2

namespace avx512 {
// Odd lanes in (64, 2^53) run vectorized (base-2 strong test, then the extra
// strong Lucas test); everything else goes to the scalar path.
void prime_flags(std::span<const u64> values, std::span<u8> out);
}  // namespace avx512

}  // namespace es::kernels
