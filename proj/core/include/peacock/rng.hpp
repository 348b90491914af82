#pragma once

#include <cmath>
#include <cstdint>

namespace peacock {

// ============================================================================
// Counter-based random streams.
//
// Stream i of base seed s is the splitmix64 sequence started at
// mix(s, i). Streams are cheap to construct, independent of worker count
// and scheduling, and reproduce bit-for-bit for a fixed (seed, id) pair.
// ============================================================================

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class RngStream {
public:
    RngStream(std::uint64_t base_seed, std::uint64_t stream_id) {
        // Decorrelate (seed, id) pairs before handing the state to splitmix64.
        std::uint64_t s = base_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
        s = splitmix64_next(s);
        state_ = s ^ (stream_id << 1);
    }

    std::uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1); safe to feed into quantile functions of unbounded laws.
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller, one spare cached per stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform_open01();
        double v = uniform_open01();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // Exponential with unit rate.
    double exponential() { return -std::log(uniform_open01()); }

private:
    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace peacock
