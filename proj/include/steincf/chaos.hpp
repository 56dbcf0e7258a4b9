#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/gil_pelaez.hpp"
#include "steincf/numeric.hpp"
#include "steincf/parallel.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/rng.hpp"
#include "steincf/targets.hpp"
#include "steincf/transfer.hpp"

namespace steincf {

// ---------------------------------------------------------------------------
// Stein symbols of the second-chaos target
// ---------------------------------------------------------------------------

struct ChaosSymbols {
    cdouble sigma_a;
    cdouble sigma_b;
};

// sigma_A = prod (1/(2 lambda_k) - i xi), sigma_B = sum (m_k/2) prod_{l != k}.
// Neither has real roots; sigma_B uses prefix/suffix products.
inline ChaosSymbols symbols(const ChaosParams& p, double xi) {
    validate(p);
    const std::size_t d = p.lambda.size();
    std::vector<cdouble> factors(d);
    for (std::size_t k = 0; k < d; ++k)
        factors[k] = cdouble(1.0 / (2.0 * p.lambda[k]), -xi);
    std::vector<cdouble> suffix(d + 1, cdouble(1.0, 0.0));
    for (std::size_t k = d; k-- > 0;) suffix[k] = suffix[k + 1] * factors[k];
    ChaosSymbols out;
    out.sigma_a = suffix[0];
    cdouble prefix(1.0, 0.0);
    kahan_csum sb;
    for (std::size_t k = 0; k < d; ++k) {
        sb.add(0.5 * double(p.multiplicity[k]) * prefix * suffix[k + 1]);
        prefix *= factors[k];
    }
    out.sigma_b = sb.value();
    return out;
}

struct ChaosEnvelopes {
    double lower;              // <= |phi_infty(xi)|
    double upper;              // >= |phi_infty(xi)|
    double sigma_a_inv_bound;  // >= 1/|sigma_A(xi)|
};

inline ChaosEnvelopes cf_envelopes(const ChaosParams& p, double xi) {
    validate(p);
    const double q = double(p.q());
    const double d = double(p.d());
    const double lmin = p.lambda_abs_min();
    const double lmax = p.lambda_abs_max();
    double prod_abs = 1.0;
    for (double l : p.lambda) prod_abs *= std::abs(l);
    ChaosEnvelopes out;
    out.lower = std::pow(1.0 + 4.0 * lmax * lmax * xi * xi, -q / 4.0);
    out.upper = std::pow(1.0 + 4.0 * lmin * lmin * xi * xi, -q / 4.0);
    out.sigma_a_inv_bound =
        std::pow(2.0, d) * prod_abs / std::pow(1.0 + 4.0 * lmin * lmin * xi * xi, d / 2.0);
    return out;
}

// ---------------------------------------------------------------------------
// CF-difference bound driven by Delta_n
// ---------------------------------------------------------------------------

// Linear-cap constant C_{d,lambda}: the envelope chain collapses the
// integral bound to C Delta |xi|. Computed constructively as a grid sup of
// the exact ratio, with a 10% margin.
inline double chaos_linear_cap_constant(const ChaosParams& p, double xi_max = 400.0) {
    validate(p);
    const double q = double(p.q());
    const double d = double(p.d());
    const double lmin = p.lambda_abs_min();
    const double lmax = p.lambda_abs_max();
    double prod_abs = 1.0;
    for (double l : p.lambda) prod_abs *= std::abs(l);
    auto integrand = [&](double s) {
        return std::pow(1.0 + s, d) * std::pow(1.0 + 4.0 * lmax * lmax * s * s, q / 4.0) /
               std::pow(1.0 + 4.0 * lmin * lmin * s * s, d / 2.0);
    };
    const auto grid = logspace(1e-3, xi_max, 160);
    double sup = 1.0;  // xi -> 0 limit of the ratio is 1 before the prefactor
    double acc = 0.0;
    double prev = 0.0;
    for (double xi : grid) {
        acc += integrate_or_throw<double>(integrand, prev, xi, 1e-11);
        prev = xi;
        const double ratio = std::pow(1.0 + 4.0 * lmin * lmin * xi * xi, -q / 4.0) * acc / xi;
        sup = std::max(sup, ratio);
    }
    return 1.1 * std::pow(2.0, d) * prod_abs * sup;
}

struct ChaosCfBound {
    double integral_bound;  // Delta |phi(xi)| int_0^xi (1+|s|)^d / |sigma_A phi| ds
    double linear_cap;      // C_{d,lambda} Delta |xi|
};

// The sharp (integral) form uses the exact |phi| and |sigma_A|; the cap uses
// the envelope-chain constant. cap_constant may be passed in when the caller
// evaluates many xi for one parameter set.
inline ChaosCfBound cf_diff_bound_integral(const ChaosParams& p, double delta_n, double xi,
                                           std::optional<double> cap_constant = std::nullopt,
                                           double tol = 1e-10) {
    validate(p);
    require_domain(delta_n >= 0, "cf_diff_bound_integral: deltaN must be >= 0");
    const double a = std::abs(xi);
    ChaosCfBound out{0.0, 0.0};
    const double cap = cap_constant ? *cap_constant : chaos_linear_cap_constant(p);
    out.linear_cap = cap * delta_n * a;
    if (a == 0.0) return out;
    const double d = double(p.d());
    const double log_abs_xi = second_chaos_log_cf(p, a).real();
    auto integrand = [&](double s) {
        const auto sym = symbols(p, s);
        return std::pow(1.0 + s, d) *
               std::exp(log_abs_xi - second_chaos_log_cf(p, s).real()) / std::abs(sym.sigma_a);
    };
    out.integral_bound = delta_n * integrate_or_throw<double>(integrand, 0.0, a, tol);
    return out;
}

// ---------------------------------------------------------------------------
// U-statistic with kernel h(x,y) = alpha x y  (q = 1)
// ---------------------------------------------------------------------------

struct UStatConfig {
    double alpha = 1.0;
    long long n = 4;
    std::uint64_t seed = 0;
};

inline void validate(const UStatConfig& cfg) {
    require_domain(cfg.alpha != 0.0, "UStatConfig: alpha must be nonzero");
    require_domain(cfg.n >= 2, "UStatConfig: n must be >= 2");
}

// n U_n(h) = (2 alpha/(n-1)) sum_{i<j} Z_i Z_j = alpha [(sum Z)^2 - sum Z^2]/(n-1),
// O(n) per draw. Deterministic per (seed, rep index block).
inline std::vector<double> ustat_sample(const UStatConfig& cfg, std::size_t reps) {
    validate(cfg);
    std::vector<double> out(reps);
    const std::size_t n_tasks = std::max<std::size_t>(1, std::min<std::size_t>(64, reps / 256));
    const std::size_t block = (reps + n_tasks - 1) / n_tasks;
    parallel_tasks(n_tasks, [&](std::size_t task) {
        rng_stream rng = substream(cfg.seed, 0x05AF, std::uint64_t(cfg.n), task);
        const std::size_t lo = task * block;
        const std::size_t hi = std::min(reps, lo + block);
        for (std::size_t r = lo; r < hi; ++r) {
            kahan_sum s1, s2;
            for (long long i = 0; i < cfg.n; ++i) {
                const double z = rng.normal();
                s1.add(z);
                s2.add(z * z);
            }
            const double s = s1.value();
            out[r] = cfg.alpha * (s * s - s2.value()) / double(cfg.n - 1);
        }
    });
    return out;
}

// kappa_2(n U_n) = alpha^2 2n/(n-1).
inline double ustat_kappa2(double alpha, long long n) {
    require_domain(n >= 2, "ustat_kappa2: n must be >= 2");
    return alpha * alpha * 2.0 * double(n) / double(n - 1);
}

// Delta_n <= alpha^2 sqrt(n(n-3)/(n-1)^3) + |alpha|/(n-1).
inline double ustat_delta_bound(double alpha, long long n) {
    require_domain(n >= 4, "ustat_delta_bound: n must be >= 4");
    const double nn = double(n);
    return alpha * alpha * std::sqrt(nn * (nn - 3.0) / std::pow(nn - 1.0, 3)) +
           std::abs(alpha) / (nn - 1.0);
}

// ---------------------------------------------------------------------------
// Moment-form Delta_n bound for targets nu (Z^2 - 1), second-chaos sequences
// ---------------------------------------------------------------------------

struct ChaosMoments {
    double ef2 = 0.0;
    double ef3 = 0.0;
    double ef4 = 0.0;
};

// Delta_n <= sqrt( (nu^2 - EF2/2) EF2 + 4 nu^4 - (nu/2) EF3
//                  - (5/2) nu^4 + EF4/24 + (3/8)(EF2^2 - 4 nu^4) )
//           + |nu^2 - EF2/2|.
// The radicand cancels exactly at the target's own moments.
inline double ncgamma_moment_bound(double nu, const ChaosMoments& m) {
    require_domain(nu > 0, "ncgamma_moment_bound: nu must be positive");
    require_domain(m.ef2 > 0, "ncgamma_moment_bound: EF2 must be positive");
    const double nu2 = nu * nu;
    const double nu4 = nu2 * nu2;
    double radicand = (nu2 - 0.5 * m.ef2) * m.ef2 + (4.0 * nu4 - 0.5 * nu * m.ef3) +
                      (-2.5 * nu4 + m.ef4 / 24.0) + 0.375 * (m.ef2 * m.ef2 - 4.0 * nu4);
    if (radicand < -1e-9)
        throw domain_error("ncgamma_moment_bound: inconsistent moments (negative radicand)");
    radicand = std::max(radicand, 0.0);
    return std::sqrt(radicand) + std::abs(nu2 - 0.5 * m.ef2);
}

// ---------------------------------------------------------------------------
// Distance bounds and the U-statistic experiment
// ---------------------------------------------------------------------------

// Two-sided mgf of the target, finite for |g| < 1/(2 max|lambda|).
inline double second_chaos_two_sided_mgf(const ChaosParams& p, double g) {
    auto one_sided = [&](double gamma) {
        kahan_sum log_mgf;
        for (std::size_t k = 0; k < p.lambda.size(); ++k) {
            const double gl = gamma * p.lambda[k];
            if (gl >= 0.5) return std::numeric_limits<double>::infinity();
            log_mgf.add(double(p.multiplicity[k]) * (-gl - 0.5 * std::log1p(-2.0 * gl)));
        }
        return std::exp(log_mgf.value());
    };
    return one_sided(g) + one_sided(-g);
}

// Theorem-level assembly: W2 from the linear cap via the exponential-tail
// transfer; Kolmogorov (q >= 3 only) from Esseen with T = 1/sqrt(Delta_n).
inline BoundReport chaos_distance_bounds(const ChaosParams& p, double delta_n,
                                         int wasserstein_order = 2,
                                         std::optional<double> cap_constant = std::nullopt) {
    validate(p);
    require_domain(delta_n > 0 && delta_n < 1,
                   "chaos_distance_bounds: deltaN must lie in (0,1)");
    require_domain(wasserstein_order >= 2, "chaos_distance_bounds: order must be >= 2");

    const double cap = cap_constant ? *cap_constant : chaos_linear_cap_constant(p);

    // sub-exponential tails of the target law via Markov on its mgf
    const double g_max = 0.45 / p.lambda_abs_max();
    std::vector<double> grid;
    for (double f : {0.25, 0.5, 0.75, 1.0}) grid.push_back(f * g_max);
    const auto tail = estimate_subexp_tail(
        [&](double g) { return second_chaos_two_sided_mgf(p, g); }, grid);

    BoundReport report;
    report.epsilon = delta_n;
    report.delta_n = delta_n;
    // H_p classes shrink as p grows, so the W2 bound covers every higher order
    report.wasserstein_order = wasserstein_order;
    report.wasserstein_bound = smooth_wasserstein_bound_exp({cap, 1, delta_n}, tail);
    report.meta["cap_constant"] = std::to_string(cap);
    report.meta["tail_lambda"] = std::to_string(tail.lambda);
    report.meta["tail_C"] = std::to_string(tail.C);
    report.meta["tails"] = "target mgf (formula-level pair)";

    if (p.q() >= 3) {
        const double m = second_chaos_density_bound(p);
        const double T = 1.0 / std::sqrt(delta_n);
        report.kolmogorov_bound = esseen_kolmogorov_bound(
            [cap, delta_n](double) { return cap * delta_n; }, m, T);
        report.meta["esseen_T"] = std::to_string(T);
        report.meta["density_bound"] = std::to_string(m);
    }
    return report;
}

struct UStatExperimentRow {
    BoundReport report;
    std::vector<double> t_grid;
    std::vector<double> cf_diff;      // |phi_emp - phi_infty|
    std::vector<double> cf_stderr;    // empirical CF standard error
    std::vector<double> cf_bound;     // (bound1) integral form
    double max_excess = 0.0;          // max(|diff| - bound - 4 se), <= 0 on pass
};

// Per n: Delta_n from the closed form, empirical CF against the exact target
// CF, and the (bound1) dominance margin on the t grid.
inline std::vector<UStatExperimentRow> ustat_experiment(double alpha,
                                                        const std::vector<long long>& n_grid,
                                                        std::size_t reps,
                                                        const std::vector<double>& t_grid,
                                                        std::uint64_t seed) {
    require_domain(alpha != 0.0, "ustat_experiment: alpha must be nonzero");
    const ChaosParams params{{alpha}, {1}};
    const CharFn phi_inf = target_cf(SecondChaosTarget{params});
    const double cap = chaos_linear_cap_constant(params);

    std::vector<UStatExperimentRow> rows(n_grid.size());
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const long long n = n_grid[i];
        UStatExperimentRow& row = rows[i];
        const double delta = ustat_delta_bound(alpha, n);
        row.report = chaos_distance_bounds(params, delta, 2, cap);
        row.report.n = n;
        row.t_grid = t_grid;

        const auto sample = ustat_sample({alpha, n, seed}, reps);
        row.cf_diff.resize(t_grid.size());
        row.cf_stderr.resize(t_grid.size());
        row.cf_bound.resize(t_grid.size());
        for (std::size_t j = 0; j < t_grid.size(); ++j) {
            const double t = t_grid[j];
            auto [value, se] = empirical_cf(sample, t);
            row.cf_diff[j] = std::abs(value - phi_inf.eval(t));
            row.cf_stderr[j] = se;
            row.cf_bound[j] = cf_diff_bound_integral(params, delta, t, cap).integral_bound;
            row.max_excess = std::max(
                row.max_excess, row.cf_diff[j] - row.cf_bound[j] - 4.0 * row.cf_stderr[j]);
        }
    }
    return rows;
}

}  // namespace steincf
