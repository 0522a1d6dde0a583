#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace drpt {

// Philox4x32-10 counter-based generator. Streams are identified by a 64-bit
// id carved out of the 128-bit counter, so any number of logical substreams
// can be derived from one master seed without shared state. Draws depend only
// on (seed, stream, position), which keeps every sampling path bit-identical
// regardless of how work is scheduled across threads.
namespace philox {

inline void round_once(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);

    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
}

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
    for (int i = 0; i < 10; ++i) round_once(ctr, key);
    return ctr;
}

} // namespace philox

inline std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    // Derives a statistically independent substream. Children of distinct
    // tags (and of distinct parents) land on distinct stream ids.
    RngStream child(std::uint64_t tag) const {
        return RngStream(seed_, mix64(stream_ ^ mix64(tag)));
    }

    std::uint64_t next_u64() {
        if (pos_ >= 2) refill();
        return out_[pos_++];
    }

    std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64()); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound), bound >= 1. Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v >= threshold) return v % bound;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard normal via Box-Muller; the spare value is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // First `count` entries of a uniform shuffle of {first, ..., first+len-1}.
    std::vector<std::uint32_t> shuffle_prefix(std::uint32_t first, std::uint32_t len,
                                              std::uint32_t count) {
        std::vector<std::uint32_t> pool(len);
        for (std::uint32_t i = 0; i < len; ++i) pool[i] = first + i;
        for (std::uint32_t i = 0; i < count; ++i) {
            const std::uint32_t j = i + static_cast<std::uint32_t>(below(len - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(count);
        return pool;
    }

private:
    void refill() {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
        const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed_),
                                                  static_cast<std::uint32_t>(seed_ >> 32)};
        const auto words = philox::block(ctr, key);
        out_[0] = (static_cast<std::uint64_t>(words[1]) << 32) | words[0];
        out_[1] = (static_cast<std::uint64_t>(words[3]) << 32) | words[2];
        pos_ = 0;
        ++block_;
    }

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> out_{};
    int pos_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace drpt
