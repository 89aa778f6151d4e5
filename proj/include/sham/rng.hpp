#pragma once

#include <cstdint>

namespace sham {

// SplitMix64 (Steele, Lea & Flood 2014). Counter-based: the state advances by a
// fixed odd increment and each output is a stateless mix of the counter, so equal
// seeds give bit-identical streams on every platform and split() yields an
// independent generator.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53 significant bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire's multiply-shift; unbiased enough for
    // sampling duties here and, more importantly, platform-independent.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    Rng split() { return Rng(next() ^ 0x6A09E667F3BCC909ULL); }

private:
    std::uint64_t state_;
};

} // namespace sham
