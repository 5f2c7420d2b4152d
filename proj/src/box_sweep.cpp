#include <algorithm>
#include <cmath>
#include <limits>

#include "es/bilinear.hpp"
#include "es/kernels.hpp"
#include "es/parallel.hpp"
#include "es/primality.hpp"

namespace es::bilinear {

namespace {

// Montgomery arithmetic modulo an odd q < 2^31 with R = 2^32.
struct Mont32 {
    u32 q = 0;
    u32 neg_inv = 0;  // -q^{-1} mod 2^32
    u32 one = 0;      // R mod q
    u32 r2 = 0;       // R^2 mod q

    explicit Mont32(u32 modulus) : q(modulus) {
        u32 inv = q;
        for (int i = 0; i < 4; ++i) inv *= 2 - q * inv;
        neg_inv = 0u - inv;
        one = static_cast<u32>((u64{1} << 32) % q);
        r2 = static_cast<u32>(static_cast<u64>(one) * one % q);
    }
    u32 reduce(u64 t) const {
        const u32 m = static_cast<u32>(t) * neg_inv;
        const u32 r = static_cast<u32>((t + static_cast<u64>(m) * q) >> 32);
        return r >= q ? r - q : r;
    }
    u32 mul(u32 a, u32 b) const { return reduce(static_cast<u64>(a) * b); }
    u32 add(u32 a, u32 b) const {
        const u32 s = a + b;
        return s >= q ? s - q : s;
    }
    u32 to(u32 a) const { return mul(a, r2); }
    u32 from(u32 a) const { return reduce(a); }
    u32 pow(u32 base, u32 e) const {
        u32 r = one;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }
};

struct SievePrime {
    Mont32 mont;
    u64 inv64;  // q^{-1} mod 2^64
    u64 lim;    // floor((2^64 - 1) / q): q | x  <=>  x * inv64 <= lim
    u32 start;  // (V + 1) mod q
};

constexpr std::size_t kRowBlock = 16;
constexpr u32 kNoRoot = std::numeric_limits<u32>::max();

struct Tally {
    u64 total = 0;
    std::array<CaseTally, 4> cases{};
    u64 case4_checked = 0;
    u64 case4_omega_failures = 0;
    u64 case4_omega_log_w_failures = 0;

    void add(const Tally& o) {
        total += o.total;
        for (int k = 0; k < 4; ++k) {
            cases[k].pairs += o.cases[k].pairs;
            cases[k].sum += o.cases[k].sum;
        }
        case4_checked += o.case4_checked;
        case4_omega_failures += o.case4_omega_failures;
        case4_omega_log_w_failures += o.case4_omega_log_w_failures;
    }
};

// Shared per-box constants.
struct SweepSetup {
    const BoxSpec& box;
    bool classify;
    CaseThresholds thresholds;
    u64 zf;
    double log_n_max;
    double log_w;
    u64 q_max;
    u128 q2;
    u128 q3;
    std::vector<SievePrime> primes;

    SweepSetup(const BoxSpec& b, bool with_cases)
        : box(b), classify(with_cases), thresholds(b), zf(with_cases ? thresholds.z_floor : 1),
          log_n_max(std::log(static_cast<double>(b.n_max()))),
          log_w(std::log(static_cast<double>(b.scale()))) {
        // Q^3 > n_max leaves at most two prime factors in every cofactor, and
        // Q > Z keeps cofactor primes out of b.
        q_max = std::max<u64>({arith::icbrt(b.n_max()) + 1, zf + 1, 3});
        q2 = static_cast<u128>(q_max) * q_max;
        q3 = q2 * q_max;
        for (u32 q : arith::primes_up_to(q_max)) {
            if (q == 2) continue;  // 4 l a^2 + 1 is odd
            SievePrime sp{Mont32(q), 0, std::numeric_limits<u64>::max() / q,
                          static_cast<u32>((b.V + 1) % q)};
            u64 inv = q;
            for (int i = 0; i < 5; ++i) inv *= 2 - q * inv;
            sp.inv64 = inv;
            primes.push_back(sp);
        }
    }
};

struct RowState {
    std::vector<u64> m;   // unfactored part
    std::vector<u32> d;   // divisor count of the factored part
    std::vector<u64> b;   // prefix product <= Z
    std::vector<u64> pc;  // first prime that did not fit into b, 0 while open
    std::vector<u8> om;   // Omega of the c part so far
    std::vector<u64> prp_values;
    std::vector<u32> prp_cells;
    std::vector<u8> prp_flags;

    RowState(std::size_t n, bool classify) : m(n), d(n), b(classify ? n : 0), pc(classify ? n : 0), om(classify ? n : 0) {}
};

class RowSweeper {
public:
    explicit RowSweeper(const SweepSetup& s)
        : s_(s), row_(s.box.V, s.classify), offsets_(kRowBlock * s.primes.size()) {}

    void run_block(u64 a_first, u64 a_last, Tally& tally) {
        const std::size_t rows = a_last - a_first + 1;
        compute_offsets(a_first, rows);
        for (std::size_t j = 0; j < rows; ++j) {
            if (s_.classify) {
                sieve_row<true>(a_first + j, j, tally);
            } else {
                sieve_row<false>(a_first + j, j, tally);
            }
        }
    }

private:
    // offsets_[j * P + k]: first cell index i (l = V + 1 + i) with prime k
    // dividing 4 l a_j^2 + 1, or kNoRoot when q | a_j.
    void compute_offsets(u64 a_first, std::size_t rows) {
        const std::size_t np = s_.primes.size();
        u32 c[kRowBlock];
        u32 prefix[kRowBlock];
        for (std::size_t k = 0; k < np; ++k) {
            const SievePrime& sp = s_.primes[k];
            const Mont32& mt = sp.mont;
            u32 am = mt.to(static_cast<u32>(a_first % mt.q));
            u32 acc = mt.one;
            for (std::size_t j = 0; j < rows; ++j) {
                u32 v = mt.mul(am, am);
                v = mt.add(v, v);
                v = mt.add(v, v);
                c[j] = v;
                if (v != 0) acc = mt.mul(acc, v);
                prefix[j] = acc;
                am = mt.add(am, mt.one);
            }
            u32 inv = mt.pow(acc, mt.q - 2);
            for (std::size_t j = rows; j-- > 0;) {
                if (c[j] == 0) {
                    offsets_[j * np + k] = kNoRoot;
                    continue;
                }
                const u32 before = j == 0 ? mt.one : prefix[j - 1];
                const u32 cinv = mt.from(mt.mul(inv, before));  // (4 a_j^2)^{-1} mod q
                inv = mt.mul(inv, c[j]);
                const u32 root = cinv == 0 ? 0 : mt.q - cinv;  // l = -(4 a^2)^{-1}
                offsets_[j * np + k] = root >= sp.start ? root - sp.start : root + mt.q - sp.start;
            }
        }
    }

    template <bool Classify>
    void sieve_row(u64 a, std::size_t j, Tally& tally) {
        const u64 V = s_.box.V;
        const u64 coeff = 4 * a * a;
        RowState& r = row_;
        u64 n = coeff * (V + 1) + 1;
        for (u64 i = 0; i < V; ++i, n += coeff) {
            r.m[i] = n;
            r.d[i] = 1;
        }
        if constexpr (Classify) {
            std::fill(r.b.begin(), r.b.end(), 1);
            std::fill(r.pc.begin(), r.pc.end(), 0);
            std::fill(r.om.begin(), r.om.end(), 0);
        }
        const std::size_t np = s_.primes.size();
        const u32* off = offsets_.data() + j * np;
        const u64 zf = s_.zf;
        for (std::size_t k = 0; k < np; ++k) {
            if (off[k] == kNoRoot) continue;
            const SievePrime& sp = s_.primes[k];
            const u64 q = sp.mont.q;
            for (u64 i = off[k]; i < V; i += q) {
                u64 x = r.m[i] * sp.inv64;
                u64 qe = q;
                unsigned e = 1;
                for (u64 y = x * sp.inv64; y <= sp.lim; y = x * sp.inv64) {
                    x = y;
                    qe *= q;
                    ++e;
                }
                r.m[i] = x;
                r.d[i] *= e + 1;
                if constexpr (Classify) {
                    if (r.pc[i] == 0) {
                        if (qe <= zf / r.b[i]) {
                            r.b[i] *= qe;
                            continue;
                        }
                        r.pc[i] = q;
                    }
                    r.om[i] += e;
                }
            }
        }
        finish_row<Classify>(tally);
    }

    // Every prime left in m exceeds Q > Z, so it always lands in c.
    template <bool Classify>
    static void add_large(RowState& r, u64 i, u64 p, unsigned e) {
        if constexpr (Classify) {
            if (r.pc[i] == 0) r.pc[i] = p;
            r.om[i] += e;
        }
    }

    template <bool Classify>
    void finish_row(Tally& tally) {
        RowState& r = row_;
        const u64 V = s_.box.V;
        r.prp_values.clear();
        r.prp_cells.clear();
        for (u64 i = 0; i < V; ++i) {
            const u64 x = r.m[i];
            if (x == 1) continue;
            if (x < s_.q2) {
                r.d[i] *= 2;
                add_large<Classify>(r, i, x, 1);
            } else if (x < s_.q3) {
                u64 root;
                if (arith::is_square(x, &root)) {
                    r.d[i] *= 3;
                    add_large<Classify>(r, i, root, 2);
                } else {
                    r.prp_values.push_back(x);
                    r.prp_cells.push_back(static_cast<u32>(i));
                }
            } else {
                for (const auto& pp : arith::factorize(x).factors) {
                    r.d[i] *= pp.exponent + 1;
                    add_large<Classify>(r, i, static_cast<u64>(pp.prime), pp.exponent);
                }
            }
        }
        r.prp_flags.resize(r.prp_values.size());
        kernels::prime_flags(r.prp_values, r.prp_flags);
        for (std::size_t t = 0; t < r.prp_values.size(); ++t) {
            const u32 i = r.prp_cells[t];
            if (r.prp_flags[t]) {
                r.d[i] *= 2;
                add_large<Classify>(r, i, r.prp_values[t], 1);
            } else {
                // Two distinct primes above Q; only their count matters here.
                r.d[i] *= 4;
                add_large<Classify>(r, i, s_.q_max + 1, 2);
            }
        }
        if constexpr (Classify) {
            for (u64 i = 0; i < V; ++i) record(r.d[i], r.b[i], r.pc[i], r.om[i], tally);
        } else {
            u64 sum = 0;
            for (u64 i = 0; i < V; ++i) sum += r.d[i];
            tally.total += sum;
        }
    }

public:
    static void record_cell(const SweepSetup& s, u64 d, u64 b, u64 pc, unsigned om, Tally& tally) {
        tally.total += d;
        if (!s.classify) return;
        const CaseLabel label = s.thresholds.label(b, pc);
        auto& slot = tally.cases[static_cast<int>(label)];
        ++slot.pairs;
        slot.sum += d;
        if (label == CaseLabel::IV) {
            ++tally.case4_checked;
            const double lp = std::log(static_cast<double>(pc));
            if (om > 3.0 * s.log_n_max / lp) ++tally.case4_omega_failures;
            if (om > 3.0 * s.log_w / lp) ++tally.case4_omega_log_w_failures;
        }
    }

private:
    void record(u64 d, u64 b, u64 pc, unsigned om, Tally& tally) const { record_cell(s_, d, b, pc, om, tally); }

    const SweepSetup& s_;
    RowState row_;
    std::vector<u32> offsets_;
};

void factorize_block(const SweepSetup& s, u64 a_first, u64 a_last, Tally& tally) {
    const BoxSpec& box = s.box;
    for (u64 a = a_first; a <= a_last; ++a) {
        for (u64 l = box.V + 1; l <= 2 * box.V; ++l) {
            const u64 n = 4 * l * a * a + 1;
            const auto f = arith::factorize(n);
            const u64 d = static_cast<u64>(arith::divisor_count(f));
            if (!s.classify) {
                tally.total += d;
                continue;
            }
            const BcSplit split = split_bc(f, static_cast<double>(s.zf));
            RowSweeper::record_cell(s, d, static_cast<u64>(split.b), static_cast<u64>(split.least_prime_of_c),
                                    split.omega_c, tally);
        }
    }
}

BoxResult run_sweep(const BoxSpec& box, SweepMethod method, unsigned workers, bool classify) {
    if (classify) {
        box.validate();
    } else {
        if (box.V == 0 || box.W == 0) throw ConfigError("V and W must be positive");
        box.n_max();
    }
    if (method == SweepMethod::Sieve && box.V > (u64{1} << 27)) {
        throw CapacityError("sieve rows longer than 2^27 cells are not supported");
    }
    const SweepSetup setup(box, classify);
    const u64 a_first = box.W + 1;
    const u64 rows = box.W;
    const std::size_t chunks = (rows + kRowBlock - 1) / kRowBlock;
    std::vector<Tally> parts(chunks);
    parallel_chunks(chunks, workers, [&](std::size_t c) {
        const u64 lo = a_first + c * kRowBlock;
        const u64 hi = std::min<u64>(lo + kRowBlock - 1, 2 * box.W);
        if (method == SweepMethod::Factorize) {
            factorize_block(setup, lo, hi, parts[c]);
        } else {
            RowSweeper(setup).run_block(lo, hi, parts[c]);
        }
    });
    Tally all;
    for (const auto& p : parts) all.add(p);
    BoxResult out;
    out.box = box;
    out.total = all.total;
    out.cases = all.cases;
    out.case4_checked = all.case4_checked;
    out.case4_omega_failures = all.case4_omega_failures;
    out.case4_omega_log_w_failures = all.case4_omega_log_w_failures;
    return out;
}

}  // namespace

BoxResult sweep_box(const BoxSpec& box, SweepMethod method, unsigned workers) {
    return run_sweep(box, method, workers, true);
}

u64 bilinear_divisor_sum(u64 V, u64 W, unsigned workers) {
    BoxSpec box;
    box.V = V;
    box.W = W;
    box.theta = 0.5;
    box.allow_degenerate = true;
    return run_sweep(box, SweepMethod::Sieve, workers, false).total;
}

}  // namespace es::bilinear
