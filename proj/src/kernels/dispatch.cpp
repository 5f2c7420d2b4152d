#include <atomic>
#include <cstdlib>
#include <string>

#include "es/kernels.hpp"

namespace es::kernels {

namespace {

Isa probe() {
#if defined(__x86_64__)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512ifma") &&
        __builtin_cpu_supports("avx512dq") && __builtin_cpu_supports("avx2")) {
        return Isa::Avx512Ifma;
    }
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::Avx2;
#endif
    return Isa::Scalar;
}

Isa cap(Isa wanted) {
    const Isa hw = detected_isa();
    return static_cast<int>(wanted) > static_cast<int>(hw) ? hw : wanted;
}

Isa from_env() {
    const char* env = std::getenv("ES_SIMD");
    if (env == nullptr) return detected_isa();
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2") return cap(Isa::Avx2);
    return detected_isa();
}

std::atomic<int>& active_slot() {
    static std::atomic<int> slot{static_cast<int>(from_env())};
    return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Avx512Ifma: return "avx512ifma";
    }
    return "?";
}

Isa detected_isa() {
    static const Isa isa = probe();
    return isa;
}

Isa active_isa() { return static_cast<Isa>(active_slot().load(std::memory_order_relaxed)); }

void force_isa(Isa isa) { active_slot().store(static_cast<int>(cap(isa)), std::memory_order_relaxed); }

void prime_flags(std::span<const u64> values, std::span<u8> out) {
    if (active_isa() == Isa::Avx512Ifma) {
        avx512::prime_flags(values, out);
    } else {
        scalar::prime_flags(values, out);
    }
}

double sum_d2_over_n(std::span<const u32> d, u64 first) {
    if (active_isa() != Isa::Scalar) return avx2::sum_d2_over_n(d, first);
    return scalar::sum_d2_over_n(d, first);
}

double compensated_sum(std::span<const double> values) {
    if (active_isa() != Isa::Scalar) return avx2::compensated_sum(values);
    return scalar::compensated_sum(values);
}

}  // namespace es::kernels
