#pragma once

#include <cmath>
#include <cstdint>

namespace decum {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

/// xoshiro256++ with splitmix64 state fill. Substreams are keyed by
/// (seed, stream), so changing the number of paths never reshuffles the
/// draws of existing paths.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
        // Decorrelate seed and stream before the splitmix walk.
        std::uint64_t st = detail::mix64(seed + 0x9e3779b97f4a7c15ULL) ^
                           detail::mix64(stream ^ 0xd1b54a32d192ed03ULL);
        for (auto& w : s_) {
            st += 0x9e3779b97f4a7c15ULL;
            w = detail::mix64(st);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Multiply-shift; bias is O(n / 2^64), negligible for our n.
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Box-Muller pair of independent standard normals.
    void normal_pair(double& z1, double& z2) {
        double u1 = uniform01();
        double u2 = uniform01();
        // u1 = 0 would blow up the log; nudge to the smallest representable draw.
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        z1 = r * std::cos(a);
        z2 = r * std::sin(a);
    }

    double normal() {
        double z1, z2;
        normal_pair(z1, z2);
        return z1;
    }

    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

    /// Poisson count by inversion of the product of uniforms (fine for small means).
    int poisson(double mean) {
        const double limit = std::exp(-mean);
        int k = 0;
        double prod = 1.0;
        do {
            prod *= uniform01();
            ++k;
        } while (prod > limit);
        return k - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace decum
