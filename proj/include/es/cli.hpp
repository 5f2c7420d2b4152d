#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "es/report.hpp"

namespace es::cli {

enum class Format { Human, Json, Csv };

// Exit codes; stable across commands.
enum Exit : int {
    kOk = 0,
    kFailure = 1,  // unexpected exception or I/O failure
    kUsage = 2,
    kDomain = 3,
    kCapacity = 4,
    kConfig = 5,
    kInvariant = 6,
};

struct RunConfig {
    std::string command;  // solve, split, mean, weightsum, bilinear, lemma, congruence, primes

    u64 n = 0;  // solve, split, congruence
    u64 x = 0;  // mean, weightsum, lemma 4 and 5, primes
    u64 V = 0;
    u64 W = 0;
    double theta = 1.0 / 20;
    bool cases = false;
    bool allow_degenerate = false;
    std::string which;  // lemma: 4, 5, 6, case2tail
    double Z = 0;
    int r = 1;
    u64 n_max = 0;
    u64 l = 1;             // congruence coefficient
    bool list = false;     // primes: list every prime, not only the count

    Format format = Format::Human;
    std::string output = "-";  // "-" is stdout
    std::optional<std::filesystem::path> cache_dir;  // default: cache::default_dir()
    bool use_cache = true;
    unsigned workers = 1;
};

// Throws ConfigError for unknown commands, missing or out-of-range parameters.
void validate(const RunConfig& cfg);

// Canonical JSON of the parameters that determine the result (no worker count).
std::string params_json(const RunConfig& cfg);

// True for commands whose results are cached.
bool cacheable(const std::string& command);

report::SumReport compute(const RunConfig& cfg);

struct Hooks {
    // Replaces compute() when set; lets tests inject faults.
    std::function<report::SumReport(const RunConfig&)> compute;
};

// Runs the command and writes its report; maps exceptions to exit codes.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

// Parses argv (CLI11) into a RunConfig and dispatches. --version prints the
// schema version.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Hooks& hooks = {});

}  // namespace es::cli
