#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace es {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Report/cache schema version. Bumping it invalidates every cache entry.
inline constexpr std::string_view kSchemaVersion = "1.0";

// Argument outside the mathematical domain of an operation (n = 0, p not prime, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Request exceeds a memory budget or the integer width.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Inconsistent parameters (degenerate thresholds, bad worker count, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computed object broke a property that must hold (e.g. f(p) = 0).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

std::string to_string(u128 v);
u128 parse_u128(std::string_view text);

// Multiplication that throws CapacityError instead of wrapping.
u128 checked_mul(u128 a, u128 b);
u64 checked_mul(u64 a, u64 b);

// True iff the integer v is strictly greater than the real z.
bool int_greater(u128 v, double z);

}  // namespace es
