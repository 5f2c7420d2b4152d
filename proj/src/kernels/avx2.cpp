#include <immintrin.h>

#include <cmath>

#include "es/kernels.hpp"

namespace es::kernels::avx2 {

namespace {

// Four independent Neumaier accumulators, folded at the end in lane order.
struct Neumaier4 {
    __m256d sum = _mm256_setzero_pd();
    __m256d comp = _mm256_setzero_pd();

    void add(__m256d x) {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        const __m256d t = _mm256_add_pd(sum, x);
        const __m256d big_sum = _mm256_cmp_pd(_mm256_and_pd(sum, abs_mask), _mm256_and_pd(x, abs_mask), _CMP_GE_OQ);
        const __m256d c_sum = _mm256_add_pd(_mm256_sub_pd(sum, t), x);
        const __m256d c_x = _mm256_add_pd(_mm256_sub_pd(x, t), sum);
        comp = _mm256_add_pd(comp, _mm256_blendv_pd(c_x, c_sum, big_sum));
        sum = t;
    }

    double fold(double tail_sum, double tail_comp) const {
        alignas(32) double s[4];
        alignas(32) double c[4];
        _mm256_store_pd(s, sum);
        _mm256_store_pd(c, comp);
        double total = 0.0;
        double corr = 0.0;
        auto add = [&](double v) {
            const double t = total + v;
            if (std::fabs(total) >= std::fabs(v)) {
                corr += (total - t) + v;
            } else {
                corr += (v - t) + total;
            }
            total = t;
        };
        for (int i = 0; i < 4; ++i) add(s[i]);
        add(tail_sum);
        return total + (corr + c[0] + c[1] + c[2] + c[3] + tail_comp);
    }
};

void neumaier_add(double& sum, double& comp, double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
        comp += (sum - t) + x;
    } else {
        comp += (x - t) + sum;
    }
    sum = t;
}

}  // namespace

double sum_d2_over_n(std::span<const u32> d, u64 first) {
    Neumaier4 acc;
    const std::size_t n = d.size();
    std::size_t i = 0;
    __m256d idx = _mm256_setr_pd(static_cast<double>(first), static_cast<double>(first + 1),
                                 static_cast<double>(first + 2), static_cast<double>(first + 3));
    const __m256d four = _mm256_set1_pd(4.0);
    for (; i + 4 <= n; i += 4) {
        const __m128i raw = _mm_loadu_si128(reinterpret_cast<const __m128i*>(d.data() + i));
        const __m256d dv = _mm256_cvtepi32_pd(raw);
        acc.add(_mm256_div_pd(_mm256_mul_pd(dv, dv), idx));
        idx = _mm256_add_pd(idx, four);
    }
    double tail_sum = 0.0;
    double tail_comp = 0.0;
    for (; i < n; ++i) {
        const double dv = static_cast<double>(d[i]);
        neumaier_add(tail_sum, tail_comp, dv * dv / static_cast<double>(first + i));
    }
    return acc.fold(tail_sum, tail_comp);
}

double compensated_sum(std::span<const double> values) {
    Neumaier4 acc;
    const std::size_t n = values.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc.add(_mm256_loadu_pd(values.data() + i));
    double tail_sum = 0.0;
    double tail_comp = 0.0;
    for (; i < n; ++i) neumaier_add(tail_sum, tail_comp, values[i]);
    return acc.fold(tail_sum, tail_comp);
}

}  // namespace es::kernels::avx2
