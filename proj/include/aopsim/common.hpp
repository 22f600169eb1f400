#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aopsim {

// Error taxonomy. The CLI maps these onto process exit codes, so every
// failure raised below the CLI layer must be one of these (or a subclass).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data (CSV rows, config syntax).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input with unacceptable content (unknown key, bad range).
struct ConfigError : Error {
    using Error::Error;
};

// A quantity fed to a model equation is outside its domain
// (zero station count, empty compute set, missing forward target...).
struct DomainError : Error {
    using Error::Error;
};

// A well-posed problem instance with no feasible answer.
struct InfeasibleError : Error {
    using Error::Error;
};

// Offered load on a regional-cloud backhaul exceeds its capacity.
struct AdmissionError : InfeasibleError {
    using InfeasibleError::InfeasibleError;
};

// Invariant violation inside the toolkit itself.
struct InternalError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, 64-bit). Used for manifest content hashes and for
// deriving deterministic named RNG substreams.
inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

constexpr std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

constexpr std::uint64_t fnv1a64_u64(std::uint64_t v, std::uint64_t h = kFnvOffset) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= kFnvPrime;
    }
    return h;
}

// splitmix64 finalizer; decorrelates structured seed material.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Text helpers (no std::format on this toolchain).

inline std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r' || s[a] == '\n')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r' || s[b - 1] == '\n')) --b;
    return std::string(s.substr(a, b - a));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

// Shortest round-trippable decimal representation ("%.17g" trimmed).
inline std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) break;
    }
    return buf;
}

inline std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

}  // namespace aopsim
