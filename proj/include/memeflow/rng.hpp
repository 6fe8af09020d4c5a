#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace memeflow {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Scalar counterpart of Rng::substream for APIs that take a plain seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t sm = master;
    std::uint64_t h = splitmix64(sm);
    sm = h ^ (a * 0x9e3779b97f4a7c15ull + 0x7f4a7c15ull);
    h = splitmix64(sm);
    sm = h ^ (b * 0xbf58476d1ce4e5b9ull + 0x1ce4e5b9ull);
    return splitmix64(sm);
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that seeded runs
// reproduce bit-identically regardless of the standard library in use.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : state_) w = splitmix64(sm);
    }

    // Derives an independent substream from a master seed and stream ids.
    // Substreams are stable: the same (master, a, b) always yields the same
    // stream, no matter how many other streams were drawn in between.
    static Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t sm = master;
        std::uint64_t h = splitmix64(sm);
        sm = h ^ (a * 0x9e3779b97f4a7c15ull + 0x7f4a7c15ull);
        h = splitmix64(sm);
        sm = h ^ (b * 0xbf58476d1ce4e5b9ull + 0x1ce4e5b9ull);
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return unit() < p; }

    // Standard normal via Box-Muller (one value per call; no cached spare,
    // keeping the stream position a pure function of call count).
    double normal() {
        double u1 = unit();
        while (u1 <= 0.0) u1 = unit();
        const double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k) {
        if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
        std::vector<std::uint32_t> pool(n);
        for (std::uint32_t i = 0; i < n; ++i) pool[i] = i;
        std::vector<std::uint32_t> out;
        out.reserve(k);
        for (std::uint32_t i = 0; i < k; ++i) {
            const std::uint64_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
            out.push_back(pool[i]);
        }
        return out;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
};

}  // namespace memeflow
