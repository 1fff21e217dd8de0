#pragma once

#include <cmath>
#include <cstdint>

namespace roadfirst {

// Counter-style deterministic RNG stream. Every independent unit of work
// (tree index, synthetic-row index, ...) gets its own stream keyed by
// (master seed, stream id, substream), so results do not depend on thread
// scheduling. The generator is splitmix64; statistical quality is plenty
// for sampling work and the state is a single word.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id, std::uint64_t substream = 0) {
        state_ = mix(master_seed ^ mix(0x9E3779B97F4A7C15ULL * (stream_id + 1)));
        state_ = mix(state_ ^ (0xBF58476D1CE4E5B9ULL * (substream + 1)));
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n > 0. Rejection keeps it unbiased.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Standard normal via Box-Muller; pairs are cached per stream.
    double next_normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476 * u2;
        cached_ = r * std::sin(theta);
        have_cached_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

// Stream-id namespaces so distinct uses of the same master seed never collide.
namespace rng_streams {
constexpr std::uint64_t kBootstrap = 0x01;   // substream = tree index
constexpr std::uint64_t kTreeSplit = 0x02;   // substream = tree index
constexpr std::uint64_t kRumc = 0x03;
constexpr std::uint64_t kSmote = 0x04;       // substream = synthetic row index
constexpr std::uint64_t kSplit = 0x05;       // substream = class value
constexpr std::uint64_t kBackground = 0x06;
constexpr std::uint64_t kGenerator = 0x07;
constexpr std::uint64_t kExplainSample = 0x08;
}  // namespace rng_streams

}  // namespace roadfirst
