#pragma once

// Seeded pseudo-random streams (xoshiro256** with splitmix64 seeding).
// Deterministic across platforms; substreams derived from (seed, index)
// support chunked generation whose output is independent of scheduling.
// Streams are caller-owned and must not be shared across tasks.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace tailcal {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
    }

    // Stream for chunk `index` of a generation run seeded with `seed`.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t x = seed;
        std::uint64_t a = splitmix64(x);
        std::uint64_t y = index + 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(y);
        return Rng(a ^ (b + 0x2545f4914f6cdd1dULL));
    }

    std::uint64_t next_u64() {
        std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform draw strictly inside (0, 1).
    double next() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
};

// Fixed sequence of uniforms, handy for tests exercising inversion sampling.
class FixedSource {
public:
    explicit FixedSource(std::initializer_list<double> vals) : vals_(vals) {}
    double next() { return vals_[idx_++ % vals_.size()]; }

private:
    std::vector<double> vals_;
    std::size_t idx_ = 0;
};

}  // namespace tailcal
