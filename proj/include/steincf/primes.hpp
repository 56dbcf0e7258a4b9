#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "steincf/errors.hpp"

namespace steincf {

// Segmented sieve of Eratosthenes returning the first `count` primes.
// Range sized by the p_n <= n(ln n + ln ln n) overestimate (n >= 6).
inline std::vector<std::uint64_t> first_primes(std::size_t count) {
    require_domain(count >= 1, "first_primes: count must be >= 1");
    if (count > 50'000'000)
        throw resource_error("first_primes: sieve capacity exceeded", double(count));

    std::uint64_t bound;
    if (count < 6) {
        bound = 16;
    } else {
        const double n = double(count);
        bound = std::uint64_t(n * (std::log(n) + std::log(std::log(n)))) + 16;
    }

    const std::uint64_t root = std::uint64_t(std::sqrt(double(bound))) + 2;
    std::vector<std::uint8_t> small_composite(root + 1, 0);
    std::vector<std::uint64_t> base;
    for (std::uint64_t i = 2; i <= root; ++i) {
        if (small_composite[i]) continue;
        base.push_back(i);
        for (std::uint64_t j = i * i; j <= root; j += i) small_composite[j] = 1;
    }

    std::vector<std::uint64_t> primes;
    primes.reserve(count);
    const std::uint64_t segment = 1 << 20;
    std::vector<std::uint8_t> mark(segment);
    for (std::uint64_t lo = 2; lo <= bound && primes.size() < count; lo += segment) {
        const std::uint64_t hi = std::min(lo + segment - 1, bound);
        std::fill(mark.begin(), mark.end(), 0);
        for (std::uint64_t p : base) {
            if (p * p > hi) break;
            std::uint64_t start = ((lo + p - 1) / p) * p;
            if (start < p * p) start = p * p;
            for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 1;
        }
        for (std::uint64_t v = lo; v <= hi && primes.size() < count; ++v)
            if (!mark[v - lo]) primes.push_back(v);
    }
    if (primes.size() < count)
        throw resource_error("first_primes: sieve bound too small", double(bound));
    return primes;
}

}  // namespace steincf
