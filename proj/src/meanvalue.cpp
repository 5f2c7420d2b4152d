#include "es/meanvalue.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "es/parallel.hpp"

namespace es::meanvalue {

namespace {

struct Neumaier {
    double sum = 0;
    double comp = 0;

    void add(double v) {
        const double t = sum + v;
        comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

constexpr std::size_t kPrimesPerChunk = 256;

}  // namespace

PrimeSums prime_sums(u64 x, unsigned workers, const SplitFn& split) {
    if (x < 3) throw DomainError("prime sums need x >= 3");
    if (workers == 0) throw ConfigError("worker count must be at least 1");
    const auto tables = arith::sieve_tables(x);
    std::vector<u32> primes;
    for (u32 p : tables.primes()) {
        if (p < x) primes.push_back(p);
    }
    const SplitFn run = split ? split : [](u64 p, const arith::ArithTables& t) { return solutions::type_split(p, t); };
    const std::size_t chunks = (primes.size() + kPrimesPerChunk - 1) / kPrimesPerChunk;
    std::vector<PrimeSums> parts(chunks);
    parallel_chunks(chunks, workers, [&](std::size_t c) {
        PrimeSums& part = parts[c];
        const std::size_t end = std::min(primes.size(), (c + 1) * kPrimesPerChunk);
        for (std::size_t k = c * kPrimesPerChunk; k < end; ++k) {
            const u64 p = primes[k];
            const solutions::TypeSplit s = run(p, tables);
            if (s.total() == 0) throw InvariantViolation("f(p) = 0 for p = " + std::to_string(p));
            if (p >= 3 && s.other != 0) {
                throw InvariantViolation("p = " + std::to_string(p) + " has " + std::to_string(s.other) +
                                         " solutions with 0 or 3 denominators divisible by p");
            }
            ++part.prime_count;
            part.sum_f1 += s.f1;
            part.sum_f2 += s.f2;
            if (part.min_f_prime == 0 || s.total() < part.min_f) {
                part.min_f = s.total();
                part.min_f_prime = p;
            }
        }
    });
    PrimeSums out;
    out.x = x;
    for (const auto& part : parts) {
        out.prime_count += part.prime_count;
        out.sum_f1 += part.sum_f1;
        out.sum_f2 += part.sum_f2;
        if (part.min_f_prime != 0 && (out.min_f_prime == 0 || part.min_f < out.min_f)) {
            out.min_f = part.min_f;
            out.min_f_prime = part.min_f_prime;
        }
    }
    return out;
}

u64 sum_f1(u64 x, unsigned workers) { return prime_sums(x, workers).sum_f1; }
u64 sum_f2(u64 x, unsigned workers) { return prime_sums(x, workers).sum_f2; }

double MeanValueReport::envelope(const std::string& name) const {
    for (const auto& e : envelopes) {
        if (e.name == name) return e.value;
    }
    throw DomainError("no envelope named " + name);
}

double MeanValueReport::ratio(const std::string& name) const {
    for (const auto& r : ratios) {
        if (r.name == name) return r.value;
    }
    throw DomainError("no ratio named " + name);
}

MeanValueReport mean_value_report(const PrimeSums& sums) {
    MeanValueReport rep;
    rep.sums = sums;
    const double x = static_cast<double>(sums.x);
    const double lx = std::log(x);
    const double llx = std::log(lx);
    rep.envelopes = {
        {"x_log2", x * lx * lx},
        {"x_log2_loglog", x * lx * lx * llx},
        {"x_log5_loglog2", x * std::pow(lx, 5) * llx * llx},
        {"x_exp_log_over_loglog", x * std::exp(lx / llx)},
    };
    auto add = [&](const char* name, const char* sum, const char* env) {
        const double s = static_cast<double>(std::string_view(sum) == "sum_f1" ? sums.sum_f1 : sums.sum_f2);
        rep.ratios.push_back({name, sum, env, s / rep.envelope(env)});
    };
    add("f1_lower", "sum_f1", "x_log2");
    add("f1_upper_exp", "sum_f1", "x_exp_log_over_loglog");
    add("f1_main", "sum_f1", "x_log5_loglog2");
    add("f2_lower", "sum_f2", "x_log2");
    add("f2_upper", "sum_f2", "x_log2_loglog");
    return rep;
}

MeanValueReport mean_value_report(u64 x, unsigned workers) { return mean_value_report(prime_sums(x, workers)); }

WeightSumReport weight_sum(u64 x, unsigned workers) {
    if (x < 16) throw DomainError("weight_sum needs x >= 16");
    if (x > (u64{1} << 31)) throw CapacityError("weight_sum: x above 2^31");
    if (workers == 0) throw ConfigError("worker count must be at least 1");
    const auto tables = arith::sieve_tables(4 * x, true);
    const double xd = static_cast<double>(x);
    const int top = std::bit_width(x);  // block indices run over [-1, top)
    const std::size_t side = static_cast<std::size_t>(top) + 1;
    auto block_of = [](u64 v) { return std::bit_width(v - 1) - 1; };  // 2^i < v <= 2^{i+1}

    struct Part {
        Neumaier direct;
        std::vector<Neumaier> sums;
        std::vector<u64> pairs, dsum;
    };
    // Rows a are grouped into a fixed grid of chunks.
    const u64 rows_per_chunk = std::max<u64>(1, x / 256);
    const std::size_t chunks = (x + rows_per_chunk - 1) / rows_per_chunk;
    std::vector<Part> parts(chunks);
    parallel_chunks(chunks, workers, [&](std::size_t c) {
        Part& part = parts[c];
        part.sums.resize(side * side);
        part.pairs.assign(side * side, 0);
        part.dsum.assign(side * side, 0);
        const u64 a_lo = c * rows_per_chunk + 1;
        const u64 a_hi = std::min(x, a_lo + rows_per_chunk - 1);
        for (u64 a = a_lo; a <= a_hi; ++a) {
            const int bi = block_of(a) + 1;
            for (u64 l = 1; a * l <= x; ++l) {
                const u64 n = 4 * l * a * a + 1;
                const u64 d = n <= tables.limit()
                                  ? tables.divisor_count(n)
                                  : static_cast<u64>(arith::divisor_count(arith::factorize(n, tables)));
                const u64 al = a * l;
                const double term = xd * static_cast<double>(d) /
                                    (static_cast<double>(tables.phi(4 * al)) * std::log1p(xd / static_cast<double>(al)));
                const std::size_t slot = static_cast<std::size_t>(bi) * side + (block_of(l) + 1);
                part.direct.add(term);
                part.sums[slot].add(term);
                ++part.pairs[slot];
                part.dsum[slot] += d;
            }
        }
    });

    WeightSumReport rep;
    rep.x = x;
    const double K = std::log2(xd);
    Neumaier direct, dyadic, majorant;
    for (const auto& part : parts) direct.add(part.direct.value());
    for (std::size_t bi = 0; bi < side; ++bi) {
        for (std::size_t bj = 0; bj < side; ++bj) {
            const std::size_t slot = bi * side + bj;
            WeightBlock blk;
            blk.i = static_cast<int>(bi) - 1;
            blk.j = static_cast<int>(bj) - 1;
            Neumaier s;
            for (const auto& part : parts) {
                blk.pairs += part.pairs[slot];
                blk.divisor_sum += part.dsum[slot];
                s.add(part.sums[slot].value());
            }
            if (blk.pairs == 0) continue;
            blk.block_sum = s.value();
            blk.weight = 1.0 / (1.0 + K - blk.i - blk.j);
            rep.pairs += blk.pairs;
            dyadic.add(blk.block_sum);
            majorant.add(blk.weight * std::ldexp(static_cast<double>(blk.divisor_sum), -(blk.i + blk.j)));
            rep.blocks.push_back(blk);
        }
    }
    rep.direct_value = direct.value();
    rep.dyadic_value = dyadic.value();
    rep.majorant_value = xd * std::log(std::log(xd)) * majorant.value();
    return rep;
}

FinalChain final_chain(u64 x) {
    if (x < 16) throw DomainError("final_chain needs x >= 16");
    FinalChain fc;
    fc.x = x;
    const double xd = static_cast<double>(x);
    const int kf = std::bit_width(x) - 1;  // floor(log2 x), exact
    fc.K = std::max(std::log2(xd), static_cast<double>(kf));
    // Inner sums run in the order h = 1, 2, ... so that the harmonic line
    // adds the same number of terms, each no smaller, in the same order.
    double l0 = 0, l1 = 0, l2 = 0, l3 = 0;
    const double top = std::log2(static_cast<double>(kf) + 2);
    for (int i = 0; i <= kf; ++i) {
        const int J = kf - i;
        double inner0 = 0, inner1 = 0;
        for (int h = 1; h <= J + 1; ++h) {
            const int j = J + 1 - h;
            inner0 += 1.0 / (1.0 + fc.K - i - j);
            inner1 += 1.0 / h;
        }
        l0 += inner0;
        l1 += inner1;
        l2 += std::log2(static_cast<double>(J) + 2);
        l3 += top;
    }
    fc.lines = {l0, l1, l2, l3};
    for (int k = 0; k < 3; ++k) fc.ratios[k] = fc.lines[k + 1] / fc.lines[k];
    const double lx = std::log(xd);
    const double llx = std::log(lx);
    fc.closing_scaled = xd * std::pow(lx, 4) * llx * l3;
    fc.main_envelope = xd * std::pow(lx, 5) * llx * llx;
    fc.main_ratio = fc.closing_scaled / fc.main_envelope;
    return fc;
}

}  // namespace es::meanvalue
