#pragma once

#include <cmath>
#include <cstdint>

namespace steincf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256++, seeded via splitmix64. Deterministic across platforms.
class rng_stream {
public:
    using result_type = std::uint64_t;

    explicit rng_stream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
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

    // Uniform on (0,1): 53-bit mantissa, never exactly 0.
    double uniform01() {
        const std::uint64_t bits = (*this)() >> 11;
        return (double(bits) + 0.5) * 0x1.0p-53;
    }

    // Marsaglia polar method; consumes a variable, stream-determined number
    // of uniforms. Produces two independent standard normals.
    void normal_pair(double& n1, double& n2) {
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        n1 = u * m;
        n2 = v * m;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double a, b;
        normal_pair(a, b);
        spare_ = b;
        have_spare_ = true;
        return a;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Named substream: all task-level randomness derives from (master seed, salts).
inline rng_stream substream(std::uint64_t master_seed, std::uint64_t a, std::uint64_t b = 0,
                            std::uint64_t c = 0) {
    std::uint64_t sm = master_seed;
    std::uint64_t h = splitmix64(sm);
    sm ^= 0x6C62272E07BB0142ULL + a;
    h ^= splitmix64(sm);
    sm ^= 0x27D4EB2F165667C5ULL + b;
    h ^= splitmix64(sm);
    sm ^= 0x9E3779B97F4A7C15ULL + c;
    h ^= splitmix64(sm);
    return rng_stream(h);
}

}  // namespace steincf
