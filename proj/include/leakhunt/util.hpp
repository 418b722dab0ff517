#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "leakhunt/types.hpp"

namespace leakhunt {

// ---------------------------------------------------------------------------
// Hashing (FNV-1a, 64 bit) — used for network / meter / file fingerprints.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h);

// ---------------------------------------------------------------------------
// Deterministic RNG helpers. std::uniform_real_distribution is implementation
// defined, so uniforms are mapped from raw engine bits to keep databases and
// campaigns bit-reproducible across toolchains.
// ---------------------------------------------------------------------------

/** splitmix64 step; also used to derive independent per-item seeds. */
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/** Seed for item `index` of a stream with master `seed` (order independent). */
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    return splitmix64(s);
}

/** Uniform in [0,1) from 64 random bits. */
inline scalar_t uniform01(std::uint64_t bits) {
    return static_cast<scalar_t>(bits >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------
// Logging. Level from LEAKHUNT_LOG (error|warn|info|debug), default warn.
// ---------------------------------------------------------------------------

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel log_level();
void log(LogLevel level, const std::string& msg);

inline void log_error(const std::string& m) { log(LogLevel::Error, m); }
inline void log_warn(const std::string& m) { log(LogLevel::Warn, m); }
inline void log_info(const std::string& m) { log(LogLevel::Info, m); }
inline void log_debug(const std::string& m) { log(LogLevel::Debug, m); }

// ---------------------------------------------------------------------------
// Small formatting helpers for report files (fixed format => reproducible).
// ---------------------------------------------------------------------------

std::string fmt_num(scalar_t v);        // %.12g
std::string fmt_num_exact(scalar_t v);  // %.17g, round-trip safe

}  // namespace leakhunt
