#include "es/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <new>
#include <thread>

#include "es/arith.hpp"
#include "es/bilinear.hpp"
#include "es/cache.hpp"
#include "es/congruence.hpp"
#include "es/erdos_straus.hpp"
#include "es/meanvalue.hpp"

namespace es::cli {

using report::Cell;
using report::SumReport;

namespace {

SumReport start(const std::string& label, std::vector<report::NamedCell> params) {
    SumReport r;
    r.label = label;
    r.timestamp = report::now_utc();
    r.parameters = std::move(params);
    return r;
}

SumReport run_solve(const RunConfig& c) {
    const auto set = solutions::enumerate_solutions(c.n);
    SumReport r = start("solve", {{"n", c.n}});
    r.summary = {{"ordered_count", set.ordered_count}, {"unordered_count", set.unordered_count()}};
    r.columns = {"n1", "n2", "n3"};
    for (const auto& t : set.canonical) r.add_row({t.n1, t.n2, t.n3});
    return r;
}

SumReport run_split(const RunConfig& c) {
    const auto s = solutions::type_split(c.n);
    SumReport r = start("split", {{"p", c.n}});
    r.columns = {"p", "f1", "f2", "other", "total"};
    r.add_row({s.p, s.f1, s.f2, s.other, s.total()});
    return r;
}

SumReport run_mean(const RunConfig& c) {
    const auto rep = meanvalue::mean_value_report(c.x, c.workers);
    const auto& s = rep.sums;
    SumReport r = start("mean", {{"x", c.x}});
    r.summary = {{"min_f", s.min_f}, {"min_f_prime", s.min_f_prime}};
    r.columns = {"x", "prime_count", "sum_f1", "sum_f2"};
    std::vector<Cell> row = {s.x, s.prime_count, s.sum_f1, s.sum_f2};
    for (const auto& e : rep.envelopes) {
        r.columns.push_back(e.name);
        row.emplace_back(e.value);
    }
    for (const auto& q : rep.ratios) {
        r.columns.push_back(q.name);
        row.emplace_back(q.value);
        r.ratios.push_back({q.name, q.sum, q.envelope});
    }
    r.add_row(std::move(row));
    return r;
}

SumReport run_weightsum(const RunConfig& c) {
    const auto ws = meanvalue::weight_sum(c.x, c.workers);
    const auto fc = meanvalue::final_chain(c.x);
    SumReport r = start("weightsum", {{"x", c.x}});
    r.summary = {{"pairs", ws.pairs},
                 {"direct_value", ws.direct_value},
                 {"dyadic_value", ws.dyadic_value},
                 {"relative_error", std::fabs(ws.dyadic_value - ws.direct_value) / ws.direct_value},
                 {"majorant_value", ws.majorant_value},
                 {"chain_K", fc.K}};
    for (std::size_t k = 0; k < fc.lines.size(); ++k) {
        r.summary.push_back({std::string("chain_") + meanvalue::kChainLineNames[k], fc.lines[k]});
    }
    r.summary.push_back({"closing_scaled", fc.closing_scaled});
    r.summary.push_back({"main_envelope", fc.main_envelope});
    r.summary.push_back({"main_ratio", fc.main_ratio});
    r.columns = {"i", "j", "pairs", "divisor_sum", "block_sum", "weight"};
    for (const auto& b : ws.blocks) {
        r.add_row({std::int64_t{b.i}, std::int64_t{b.j}, b.pairs, b.divisor_sum, b.block_sum, b.weight});
    }
    return r;
}

SumReport run_bilinear(const RunConfig& c) {
    bilinear::BoxSpec box;
    box.V = c.V;
    box.W = c.W;
    box.theta = c.theta;
    box.allow_degenerate = c.allow_degenerate;
    SumReport r = start("bilinear", {{"V", c.V}, {"W", c.W}, {"theta", c.theta}, {"cases", u64{c.cases}},
                                     {"allow_degenerate", u64{c.allow_degenerate}}});
    r.columns = {"case", "V", "W", "theta", "pairs", "sum", "envelope", "ratio"};
    r.ratios = {{"ratio", "sum", "envelope"}};
    auto add = [&](std::string name, u64 pairs, u64 sum, double env) {
        r.add_row({std::move(name), c.V, c.W, c.theta, pairs, sum, env, static_cast<double>(sum) / env});
    };
    u64 total = 0;
    if (c.cases) {
        const auto res = bilinear::sweep_box(box, bilinear::SweepMethod::Sieve, c.workers);
        for (auto label : bilinear::kAllCases) {
            const auto& t = res.cases[static_cast<std::size_t>(label)];
            add(std::string(bilinear::case_name(label)), t.pairs, t.sum, bilinear::case_envelope(label, box));
        }
        total = res.total;
        r.summary = {{"case4_checked", res.case4_checked}, {"case4_omega_failures", res.case4_omega_failures}};
    } else {
        total = bilinear::bilinear_divisor_sum(c.V, c.W, c.workers);
    }
    add("all", box.pair_count(), total, bilinear::box_envelope(box));
    r.summary.insert(r.summary.begin(), {"total", total});
    return r;
}

SumReport run_lemma(const RunConfig& c) {
    SumReport r = start("lemma", {{"which", c.which}});
    r.ratios = {{"ratio", "sum", "envelope"}};
    if (c.which == "4") {
        r.parameters.push_back({"x", c.x});
        const double lx = std::log(static_cast<double>(c.x));
        const double s = arith::d2_over_n_partial(c.x);
        r.columns = {"x", "sum", "envelope", "ratio"};
        r.add_row({c.x, s, std::pow(lx, 4), s / std::pow(lx, 4)});
    } else if (c.which == "5") {
        r.parameters.push_back({"x", c.x});
        const double lx = std::log(static_cast<double>(c.x));
        const double y = lx * std::log(lx);
        const u64 psi = arith::smooth_count(c.x, y);
        const double env = std::exp(3 * lx / std::sqrt(std::log(lx)));
        r.columns = {"x", "y", "sum", "envelope", "ratio"};
        r.add_row({c.x, y, psi, env, static_cast<double>(psi) / env});
    } else if (c.which == "6") {
        r.parameters.insert(r.parameters.end(), {{"Z", c.Z}, {"r", u64(c.r)}, {"n_max", c.n_max}});
        const auto res = bilinear::lemma6_sum(c.Z, c.r, c.n_max);
        r.columns = {"Z", "r", "n_max", "lhs_truncated", "tail_bound", "tail_sigma", "sum", "envelope", "ratio"};
        r.add_row({res.Z, std::int64_t{res.r}, res.n_max, res.lhs_truncated, res.tail_bound, res.tail_sigma,
                   res.lhs_full, res.rhs, res.ratio});
    } else {
        r.parameters.push_back({"Z", c.Z});
        const auto t = bilinear::case2_tail(c.Z);
        r.summary = {{"primes", u64(t.terms.size())},
                     {"dominated", u64{t.dominated}},
                     {"s_at_least_2", u64{t.s_at_least_2}},
                     {"power_within_Z", u64{t.power_within_Z}}};
        r.columns = {"Z", "sum", "envelope", "ratio"};
        r.add_row({t.Z, t.tail, t.majorant, t.tail / t.majorant});
    }
    return r;
}

SumReport run_congruence(const RunConfig& c) {
    SumReport r = start("congruence", {{"l", c.l}, {"n", c.n}});
    const auto f = arith::factorize(c.n);
    r.columns = {"l", "n", "roots", "divisor_count"};
    r.add_row({c.l, c.n, congruence::quad_root_count(c.l, f), u64(arith::divisor_count(f))});
    if (c.n <= congruence::kOracleModulusLimit) {
        r.summary = {{"direct_count", congruence::quad_root_count_oracle(c.l, c.n)}};
    }
    return r;
}

SumReport run_primes(const RunConfig& c) {
    const auto primes = arith::primes_up_to(c.x);
    SumReport r = start("primes", {{"x", c.x}, {"list", u64{c.list}}});
    r.summary = {{"prime_count", u64(primes.size())}};
    if (c.list) {
        r.columns = {"p"};
        for (u32 p : primes) r.add_row({u64{p}});
    }
    return r;
}

void emit(const SumReport& r, Format f, std::ostream& os) {
    switch (f) {
        case Format::Json: os << report::to_json(r); break;
        case Format::Csv: os << report::to_csv(r); break;
        case Format::Human: os << report::to_human(r); break;
    }
}

}  // namespace

bool cacheable(const std::string& command) {
    return command == "mean" || command == "weightsum" || command == "bilinear" || command == "lemma";
}

void validate(const RunConfig& c) {
    if (c.workers == 0) throw ConfigError("--workers must be at least 1");
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError(c.command + ": " + what);
    };
    const std::string& cmd = c.command;
    if (cmd == "solve" || cmd == "split") {
        need(c.n >= 1, "n must be at least 1");
    } else if (cmd == "mean") {
        need(c.x >= 3, "--x must be at least 3");
    } else if (cmd == "weightsum") {
        need(c.x >= 16, "--x must be at least 16");
    } else if (cmd == "bilinear") {
        need(c.V >= 1 && c.W >= 1, "--V and --W must be at least 1");
        need(c.theta > 0 && c.theta <= 1, "--theta must lie in (0, 1]");
    } else if (cmd == "lemma") {
        if (c.which == "4" || c.which == "5") {
            need(c.x >= 16, "--x must be at least 16");
        } else if (c.which == "6") {
            need(c.Z >= 16 && c.r >= 1 && c.n_max >= 1, "lemma 6 needs --Z >= 16, --r >= 1, --n-max >= 1");
        } else if (c.which == "case2tail") {
            need(c.Z >= 4, "--Z must be at least 4");
        } else {
            need(false, "--which must be 4, 5, 6 or case2tail");
        }
    } else if (cmd == "congruence") {
        need(c.n >= 1 && c.l >= 1, "--n and --l must be at least 1");
    } else if (cmd == "primes") {
        need(c.x >= 1, "--x must be at least 1");
    } else {
        throw ConfigError("unknown command '" + cmd + "'");
    }
}

std::string params_json(const RunConfig& c) {
    nlohmann::json j;
    const std::string& cmd = c.command;
    if (cmd == "solve" || cmd == "split") {
        j["n"] = c.n;
    } else if (cmd == "mean" || cmd == "weightsum") {
        j["x"] = c.x;
    } else if (cmd == "bilinear") {
        j = {{"V", c.V}, {"W", c.W}, {"theta", c.theta}, {"cases", c.cases}, {"allow_degenerate", c.allow_degenerate}};
    } else if (cmd == "lemma") {
        j["which"] = c.which;
        if (c.which == "4" || c.which == "5") j["x"] = c.x;
        if (c.which == "6") j.update({{"Z", c.Z}, {"r", c.r}, {"n_max", c.n_max}});
        if (c.which == "case2tail") j["Z"] = c.Z;
    } else if (cmd == "congruence") {
        j = {{"l", c.l}, {"n", c.n}};
    } else if (cmd == "primes") {
        j = {{"x", c.x}, {"list", c.list}};
    }
    return j.dump();
}

SumReport compute(const RunConfig& c) {
    validate(c);
    const std::string& cmd = c.command;
    if (cmd == "solve") return run_solve(c);
    if (cmd == "split") return run_split(c);
    if (cmd == "mean") return run_mean(c);
    if (cmd == "weightsum") return run_weightsum(c);
    if (cmd == "bilinear") return run_bilinear(c);
    if (cmd == "lemma") return run_lemma(c);
    if (cmd == "congruence") return run_congruence(c);
    return run_primes(c);
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Hooks& hooks) {
    try {
        validate(cfg);
        std::optional<cache::Cache> store;
        if (cfg.use_cache && cacheable(cfg.command)) store.emplace(cfg.cache_dir.value_or(cache::default_dir()));
        const std::string params = params_json(cfg);
        SumReport rep;
        std::optional<std::string> hit;
        if (store) hit = store->load(cfg.command, params);
        if (hit) {
            rep = report::from_json(*hit);
        } else {
            rep = hooks.compute ? hooks.compute(cfg) : compute(cfg);
            report::validate(rep);
            if (store) store->store(cfg.command, params, report::to_json(rep));
        }
        if (cfg.output == "-") {
            emit(rep, cfg.format, out);
        } else {
            std::ofstream file(cfg.output, std::ios::binary);
            emit(rep, cfg.format, file);
            if (!file) {
                err << "es: cannot write " << cfg.output << "\n";
                return kFailure;
            }
        }
        return kOk;
    } catch (const DomainError& e) {
        err << "es: domain error: " << e.what() << "\n";
        return kDomain;
    } catch (const CapacityError& e) {
        err << "es: capacity error: " << e.what() << "\n";
        return kCapacity;
    } catch (const std::bad_alloc&) {
        err << "es: capacity error: out of memory\n";
        return kCapacity;
    } catch (const ConfigError& e) {
        err << "es: configuration error: " << e.what() << "\n";
        return kConfig;
    } catch (const InvariantViolation& e) {
        err << "es: invariant violation: " << e.what() << "\n";
        return kInvariant;
    } catch (const std::exception& e) {
        err << "es: " << e.what() << "\n";
        return kFailure;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks) {
    CLI::App app{"Erdos-Straus counting and bilinear divisor sums"};
    app.set_version_flag("--version", std::string(kSchemaVersion));
    app.require_subcommand(1);

    RunConfig cfg;
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    std::string json_path, csv_path, cache_dir;
    bool no_cache = false;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
        auto* j = sub->add_option("--json", json_path, "Write JSON (to a file, or - for stdout)")->expected(0, 1);
        auto* c = sub->add_option("--csv", csv_path, "Write CSV (to a file, or - for stdout)")->expected(0, 1);
        j->excludes(c);
        sub->add_option("--cache-dir", cache_dir, "Cache directory");
        sub->add_flag("--no-cache", no_cache, "Neither read nor write the cache");
    };

    auto* solve = app.add_subcommand("solve", "Solutions of 4/n = 1/n1 + 1/n2 + 1/n3");
    solve->add_option("n", cfg.n)->required();
    auto* split = app.add_subcommand("split", "f1(p), f2(p) for a prime p");
    split->add_option("p", cfg.n)->required();
    auto* mean = app.add_subcommand("mean", "Sums of f1, f2 over primes below x, with envelopes");
    mean->add_option("--x", cfg.x)->required();
    auto* weight = app.add_subcommand("weightsum", "Weighted divisor sum by dyadic blocks and the closing chain");
    weight->add_option("--x", cfg.x)->required();
    auto* bil = app.add_subcommand("bilinear", "Sum of d(4 l a^2 + 1) over a dyadic box");
    bil->add_option("--V", cfg.V)->required();
    bil->add_option("--W", cfg.W)->required();
    bil->add_option("--theta", cfg.theta, "Split exponent: Z = max(V, W)^theta");
    bil->add_flag("--cases", cfg.cases, "Split the sum by case");
    bil->add_flag("--allow-degenerate", cfg.allow_degenerate, "Accept boxes with an empty Case IV");
    auto* lemma = app.add_subcommand("lemma", "Lemma-level quantities against their envelopes");
    lemma->add_option("--which", cfg.which, "4, 5, 6 or case2tail")->required();
    lemma->add_option("--x", cfg.x);
    lemma->add_option("--Z", cfg.Z);
    lemma->add_option("--r", cfg.r);
    lemma->add_option("--n-max", cfg.n_max);
    auto* cong = app.add_subcommand("congruence", "Roots of 4 l x^2 + 1 modulo n");
    cong->add_option("--l", cfg.l);
    cong->add_option("--n", cfg.n)->required();
    auto* primes = app.add_subcommand("primes", "Primes up to x");
    primes->add_option("--x", cfg.x)->required();
    primes->add_flag("--list", cfg.list, "List every prime");
    for (auto* sub : app.get_subcommands({})) common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version exit 0; every other parse failure is a usage error.
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--json")) {
            cfg.format = Format::Json;
            cfg.output = json_path.empty() ? "-" : json_path;
        } else if (sub->count("--csv")) {
            cfg.format = Format::Csv;
            cfg.output = csv_path.empty() ? "-" : csv_path;
        }
    }
    if (!cache_dir.empty()) cfg.cache_dir = cache_dir;
    cfg.use_cache = !no_cache;
    return dispatch(cfg, out, err, hooks);
}

}  // namespace es::cli
