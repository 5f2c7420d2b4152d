#include <cmath>
#include <stdexcept>

#include "es/kernels.hpp"
#include "es/primality.hpp"

namespace es::kernels::scalar {

void prime_flags(std::span<const u64> values, std::span<u8> out) {
    if (out.size() < values.size()) throw std::invalid_argument("prime_flags: output too short");
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = arith::is_prime(values[i]) ? 1 : 0;
}

namespace {

struct Neumaier {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

double sum_d2_over_n(std::span<const u32> d, u64 first) {
    Neumaier acc;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const double dv = static_cast<double>(d[i]);
        acc.add(dv * dv / static_cast<double>(first + i));
    }
    return acc.value();
}

double compensated_sum(std::span<const double> values) {
    Neumaier acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

}  // namespace es::kernels::scalar
