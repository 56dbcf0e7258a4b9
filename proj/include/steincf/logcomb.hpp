#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "steincf/errors.hpp"
#include "steincf/lattice.hpp"
#include "steincf/numeric.hpp"
#include "steincf/parallel.hpp"
#include "steincf/primes.hpp"
#include "steincf/rng.hpp"

namespace steincf {

// Approximating sequences T_n = (1/n) sum i X_i converging to the
// generalized Dickman law:
//   Records:      X_i ~ Bernoulli(1/i), theta = 1
//   PoissonTheta: X_i ~ Poisson(theta/i)
//   Primes:       S_n = (1/log p_n) sum X_j log p_j, X_j ~ Bernoulli(1/(1+p_j))
enum class LogCombKind { Records, PoissonTheta, Primes };

struct LogCombStructure {
    LogCombKind kind = LogCombKind::Records;
    double theta = 1.0;
    long long n = 1;
};

inline void validate(const LogCombStructure& s) {
    require_domain(s.n >= 1, "LogCombStructure: n must be >= 1");
    require_domain(s.theta > 0, "LogCombStructure: theta must be positive");
    if (s.kind != LogCombKind::PoissonTheta)
        require_domain(s.theta == 1.0, "LogCombStructure: records/primes have theta = 1");
    if (s.kind == LogCombKind::Primes)
        require_domain(s.n >= 3, "LogCombStructure: primes structure needs n >= 3");
}

inline const char* logcomb_name(LogCombKind k) {
    switch (k) {
        case LogCombKind::Records: return "records";
        case LogCombKind::PoissonTheta: return "poisson";
        default: return "primes";
    }
}

// Index law P(I=j) = j E[X_j] / sum_k k E[X_k] and its cumulative thresholds
// F_0..F_n; the coupling takes I = j iff U in [F_{j-1}, F_j).
struct CouplingSpec {
    std::vector<double> index_law;   // size n, 1-based index j stored at j-1
    std::vector<double> thresholds;  // size n+1, F_0 = 0, F_n = 1
};

namespace detail {

inline std::vector<double> prime_weights(long long n, std::vector<std::uint64_t>& primes_out) {
    primes_out = first_primes(std::size_t(n));
    const double log_pn = std::log(double(primes_out.back()));
    std::vector<double> w(primes_out.size());
    for (std::size_t j = 0; j < primes_out.size(); ++j)
        w[j] = std::log(double(primes_out[j])) / log_pn;
    return w;
}

}  // namespace detail

// E[S_n] for the primes structure: (1/log p_n) sum log p_j/(1+p_j).
inline double primes_mean(long long n) {
    std::vector<std::uint64_t> primes;
    const auto w = detail::prime_weights(n, primes);
    kahan_sum z;
    for (std::size_t j = 0; j < primes.size(); ++j) z.add(w[j] / (1.0 + double(primes[j])));
    return z.value();
}

inline CouplingSpec build_coupling(const LogCombStructure& s) {
    validate(s);
    CouplingSpec out;
    out.index_law.resize(std::size_t(s.n));
    out.thresholds.resize(std::size_t(s.n) + 1, 0.0);
    if (s.kind == LogCombKind::Primes) {
        std::vector<std::uint64_t> primes;
        const auto w = detail::prime_weights(s.n, primes);
        kahan_sum z;
        for (std::size_t j = 0; j < primes.size(); ++j) z.add(w[j] / (1.0 + double(primes[j])));
        const double zn = z.value();
        kahan_sum cum;
        for (std::size_t j = 0; j < primes.size(); ++j) {
            out.index_law[j] = w[j] / ((1.0 + double(primes[j])) * zn);
            cum.add(out.index_law[j]);
            out.thresholds[j + 1] = cum.value();
        }
    } else {
        // j E[X_j] is constant in j for records (= 1) and poisson (= theta)
        for (long long j = 1; j <= s.n; ++j) {
            out.index_law[std::size_t(j - 1)] = 1.0 / double(s.n);
            out.thresholds[std::size_t(j)] = double(j) / double(s.n);
        }
    }
    out.thresholds.back() = 1.0;
    return out;
}

// Delta_n = |theta - E T_n| + E|U - I (X_I)*/n| under the monotone coupling.
struct DickmanDeltaN {
    double mean_gap = 0.0;
    double coupling_gap = 0.0;
    double total = 0.0;
};

namespace detail {

// int_a^b |u - w| du, exact.
inline double abs_linear_integral(double a, double b, double w) {
    auto F = [w](double u) {
        const double d = u - w;
        return 0.5 * d * std::abs(d);
    };
    return F(b) - F(a);
}

}  // namespace detail

// Exact piecewise integration over the coupling intervals. The size-bias
// increment per index is (X_i)* = 1 - X_i for Bernoulli components and
// (X_i)* = 1 for Poisson, with X_I drawn independently of U on each interval.
inline DickmanDeltaN delta_n(const LogCombStructure& s) {
    validate(s);
    DickmanDeltaN out;
    const auto coupling = build_coupling(s);
    kahan_sum gap;
    switch (s.kind) {
        case LogCombKind::Records: {
            out.mean_gap = 0.0;  // E T_n = (1/n) sum i * (1/i) = 1 = theta
            for (long long j = 1; j <= s.n; ++j) {
                const double a = coupling.thresholds[std::size_t(j - 1)];
                const double b = coupling.thresholds[std::size_t(j)];
                const double p = 1.0 / double(j);
                const double w = double(j) / double(s.n);  // X_j = 0 branch
                gap.add((1.0 - p) * detail::abs_linear_integral(a, b, w));
                gap.add(p * detail::abs_linear_integral(a, b, 0.0));  // X_j = 1 branch
            }
            break;
        }
        case LogCombKind::PoissonTheta: {
            out.mean_gap = 0.0;  // E T_n = (1/n) sum i * (theta/i) = theta
            for (long long j = 1; j <= s.n; ++j) {
                const double a = coupling.thresholds[std::size_t(j - 1)];
                const double b = coupling.thresholds[std::size_t(j)];
                gap.add(detail::abs_linear_integral(a, b, double(j) / double(s.n)));
            }
            break;
        }
        case LogCombKind::Primes: {
            std::vector<std::uint64_t> primes;
            const auto w = detail::prime_weights(s.n, primes);
            out.mean_gap = std::abs(1.0 - primes_mean(s.n));
            for (std::size_t j = 0; j < primes.size(); ++j) {
                const double a = coupling.thresholds[j];
                const double b = coupling.thresholds[j + 1];
                const double p = 1.0 / (1.0 + double(primes[j]));
                gap.add((1.0 - p) * detail::abs_linear_integral(a, b, w[j]));
                gap.add(p * detail::abs_linear_integral(a, b, 0.0));
            }
            break;
        }
    }
    out.coupling_gap = gap.value();
    out.total = out.mean_gap + out.coupling_gap;
    return out;
}

// |t| |theta - E T_n| + t^2 E|U - I(X_I)*/n|.
inline double cf_diff_bound(const DickmanDeltaN& d, double t) {
    return std::abs(t) * d.mean_gap + t * t * d.coupling_gap;
}

inline double cf_diff_bound(const LogCombStructure& s, double t) {
    return cf_diff_bound(delta_n(s), t);
}

// Exact Delta_n of the primes structure next to the loglog(n)/log(n) proxy.
inline std::pair<DickmanDeltaN, double> prime_delta_n(long long n) {
    require_domain(n >= 3, "prime_delta_n: n must be >= 3");
    const auto d = delta_n({LogCombKind::Primes, 1.0, n});
    const double proxy = std::log(std::log(double(n))) / std::log(double(n));
    return {d, proxy};
}

// ---------------------------------------------------------------------------
// Exact laws and samplers
// ---------------------------------------------------------------------------

// Poisson(mu) pmf truncated where the remaining tail mass drops below 1e-14,
// then renormalized.
inline std::vector<double> truncated_poisson_pmf(double mu) {
    std::vector<double> pmf;
    double p = std::exp(-mu);
    kahan_sum cum;
    for (int k = 0; k < 4000; ++k) {
        pmf.push_back(p);
        cum.add(p);
        if (1.0 - cum.value() < 1e-14 && k >= mu) break;
        p *= mu / double(k + 1);
    }
    const double total = cum.value();
    for (double& q : pmf) q /= total;
    return pmf;
}

// Exact law of T_n = (1/n) sum i X_i on the step-1/n grid by convolution DP.
inline LatticeDistribution lattice_distribution(const LogCombStructure& s, long long n) {
    LogCombStructure local = s;
    local.n = n;
    validate(local);
    require_domain(local.kind != LogCombKind::Primes,
                   "lattice_distribution: primes components are not lattice-valued");
    lattice_builder builder;
    for (long long i = 1; i <= n; ++i) {
        if (local.kind == LogCombKind::Records) {
            const double p = 1.0 / double(i);
            builder.add_component(std::size_t(i), {1.0 - p, p});
        } else {
            builder.add_component(std::size_t(i), truncated_poisson_pmf(local.theta / double(i)));
        }
    }
    return builder.finish(1.0 / double(n));
}

inline LatticeDistribution lattice_distribution(const LogCombStructure& s) {
    return lattice_distribution(s, s.n);
}

// ---------------------------------------------------------------------------
// Moment generating bounds for the sub-exponential tail hypothesis
// ---------------------------------------------------------------------------

// E[e^{gamma T_n}] = prod_k (1 + (e^{gamma k/n}-1)/k) for records.
inline double records_mgf(long long n, double gamma) {
    kahan_sum log_mgf;
    for (long long k = 1; k <= n; ++k)
        log_mgf.add(std::log1p(std::expm1(gamma * double(k) / double(n)) / double(k)));
    return std::exp(log_mgf.value());
}

// E[e^{gamma T_n}] = exp(theta sum (e^{gamma k/n}-1)/k) for poisson components.
inline double poisson_structure_mgf(double theta, long long n, double gamma) {
    kahan_sum s;
    for (long long k = 1; k <= n; ++k)
        s.add(std::expm1(gamma * double(k) / double(n)) / double(k));
    return std::exp(theta * s.value());
}

// E[e^{gamma S_n}] = prod_j (1 + (e^{gamma w_j}-1)/(1+p_j)) for primes.
inline double primes_mgf(long long n, double gamma) {
    std::vector<std::uint64_t> primes;
    const auto w = detail::prime_weights(n, primes);
    kahan_sum log_mgf;
    for (std::size_t j = 0; j < primes.size(); ++j)
        log_mgf.add(std::log1p(std::expm1(gamma * w[j]) / (1.0 + double(primes[j]))));
    return std::exp(log_mgf.value());
}

// E[e^{gamma Z_theta}] = exp(theta sum gamma^k/(k k!)); all terms positive.
inline double dickman_mgf(double theta, double gamma) {
    kahan_sum s;
    double term = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= gamma / double(k);
        const double add = term / double(k);
        s.add(add);
        if (k > gamma && add < 1e-17 * (1.0 + s.value())) break;
    }
    return std::exp(theta * s.value());
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

// Fixed-point sampler Z <- U^{1/theta} (1 + Z); the map contracts at rate
// theta/(theta+1) per step, so 200 iterations start every sample at the
// stationary law to double precision.
inline std::vector<double> sample_dickman(double theta, std::size_t count, std::uint64_t seed) {
    require_domain(theta > 0, "sample_dickman: theta must be positive");
    std::vector<double> out(count);
    const double inv_theta = 1.0 / theta;
    rng_stream rng = substream(seed, 0xD1C3);
    for (std::size_t i = 0; i < count; ++i) {
        double z = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double u = rng.uniform01();
            const double scale = theta == 1.0 ? u : std::pow(u, inv_theta);
            z = scale * (1.0 + z);
        }
        out[i] = z;
    }
    return out;
}

// Monte Carlo draws of S_n for the primes structure. Bernoulli draws compare
// raw 64-bit stream words against precomputed thresholds; tasks own disjoint
// slices and substreams, so the result is independent of scheduling.
inline std::vector<double> sample_primes_sum(long long n, std::size_t reps,
                                             std::uint64_t seed) {
    std::vector<std::uint64_t> primes;
    const auto w = detail::prime_weights(n, primes);
    std::vector<std::uint64_t> cutoff(primes.size());
    for (std::size_t j = 0; j < primes.size(); ++j) {
        const double p = 1.0 / (1.0 + double(primes[j]));
        cutoff[j] = std::uint64_t(p * 18446744073709551616.0);  // p * 2^64
    }
    std::vector<double> out(reps);
    const std::size_t n_tasks = std::max<std::size_t>(1, std::min<std::size_t>(64, reps / 4096));
    const std::size_t block = (reps + n_tasks - 1) / n_tasks;
    parallel_tasks(n_tasks, [&](std::size_t task) {
        rng_stream rng = substream(seed, 0x9121, std::uint64_t(n), task);
        const std::size_t lo = task * block;
        const std::size_t hi = std::min(reps, lo + block);
        for (std::size_t r = lo; r < hi; ++r) {
            double acc = 0.0;
            for (std::size_t j = 0; j < cutoff.size(); ++j)
                if (rng() < cutoff[j]) acc += w[j];
            out[r] = acc;
        }
    });
    return out;
}

}  // namespace steincf
