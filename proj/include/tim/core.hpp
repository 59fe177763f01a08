#pragma once

// Shared vocabulary types for the tim library: node/timestamp ids, relation
// kinds and masks, error types, and the deterministic RNG helpers every
// randomized component routes through.

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tim {

inline constexpr std::string_view kVersion = "0.1.0";

using NodeId = std::uint32_t;
using Timestamp = std::uint32_t;

inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

// Edge relation kinds. Codes are part of the wire format.
enum class Relation : std::uint8_t {
    weak = 0,   // exposure
    strong = 1, // realized invitation/adoption
    cold = 2,   // augmentation edge added by the cold-start stage
};

inline Relation relation_from_code(int code) {
    switch (code) {
        case 0: return Relation::weak;
        case 1: return Relation::strong;
        case 2: return Relation::cold;
        default: throw std::invalid_argument("unknown relation code: " + std::to_string(code));
    }
}

inline int relation_code(Relation r) { return static_cast<int>(r); }

// Bitmask over relation kinds used to scope neighbor/degree/diffusion queries.
struct RelationMask {
    std::uint8_t bits = 0;

    static constexpr RelationMask none() { return {0}; }
    static constexpr RelationMask of(Relation r) { return {static_cast<std::uint8_t>(1u << static_cast<int>(r))}; }
    static constexpr RelationMask weak_only() { return {1u << 0}; }
    static constexpr RelationMask strong_only() { return {1u << 1}; }
    static constexpr RelationMask cold_only() { return {1u << 2}; }
    static constexpr RelationMask weak_strong() { return {(1u << 0) | (1u << 1)}; }
    static constexpr RelationMask all() { return {(1u << 0) | (1u << 1) | (1u << 2)}; }

    constexpr bool contains(Relation r) const { return (bits >> static_cast<int>(r)) & 1u; }
    constexpr RelationMask with(Relation r) const { return {static_cast<std::uint8_t>(bits | (1u << static_cast<int>(r)))}; }
    constexpr bool operator==(const RelationMask&) const = default;
};

inline std::string to_string(RelationMask m) {
    std::string s;
    if (m.contains(Relation::weak)) s += "weak";
    if (m.contains(Relation::strong)) s += s.empty() ? "strong" : "+strong";
    if (m.contains(Relation::cold)) s += s.empty() ? "cold" : "+cold";
    return s.empty() ? "none" : s;
}

// Parse error carrying the 1-based input line that failed.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Deterministic randomness.
//
// std::uniform_int_distribution is implementation-defined, so sampling done
// through it would not be byte-stable across standard libraries. Everything
// seed-controlled in the library uses the helpers below instead.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for item `index` under a run-level seed.
inline std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 1)));
}

// Unbiased integer in [0, n) via rejection sampling; n must be > 0.
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = n * (std::numeric_limits<std::uint64_t>::max() / n);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

// Uniform double in [lo, hi) from 53 random bits.
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + unit * (hi - lo);
}

// Uniform sample of k items without replacement via partial Fisher-Yates:
// for i in [0, k), swap slot i with a slot drawn from [i, n). Callers pass the
// pool in a canonical order so results depend only on the rng stream.
template <class T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t k, std::mt19937_64& rng) {
    if (pool.size() <= k) return pool;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(bounded_rand(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

// FNV-1a over a byte string; used for config hashes in artifact metadata.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace tim
