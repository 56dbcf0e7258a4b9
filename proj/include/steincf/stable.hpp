#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"
#include "steincf/parallel.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/rng.hpp"
#include "steincf/targets.hpp"

namespace steincf {

// ---------------------------------------------------------------------------
// Normalizing constant and the attracted Pareto-type family
// ---------------------------------------------------------------------------

struct StableParams {
    double alpha = 1.5;
    double c = 0.0;       // (1-alpha)/(2 Gamma(2-alpha) cos(pi alpha/2))
    double lambda = 0.0;  // (2c)^{1/alpha}
};

inline StableParams stable_constant(double alpha) {
    require_domain(alpha > 1.0 && alpha < 2.0, "stable_constant: alpha must be in (1,2)");
    StableParams p;
    p.alpha = alpha;
    p.c = (1.0 - alpha) / (2.0 * std::tgamma(2.0 - alpha) * std::cos(kPi * alpha / 2.0));
    if (!(p.c > 0.0))
        throw numeric_error("stable_constant: c must come out positive", p.c);
    p.lambda = std::pow(2.0 * p.c, 1.0 / alpha);
    return p;
}

// F(x) = 1 - 1/(2(1+x/lambda)^alpha) for x > 0, mirrored for x < 0.
inline double pareto_cdf(const StableParams& p, double x) {
    if (x >= 0.0) return 1.0 - 0.5 * std::pow(1.0 + x / p.lambda, -p.alpha);
    return 0.5 * std::pow(1.0 - x / p.lambda, -p.alpha);
}

inline double pareto_density(const StableParams& p, double x) {
    const double ax = std::abs(x);
    return 0.5 * p.alpha / p.lambda * std::pow(1.0 + ax / p.lambda, -p.alpha - 1.0);
}

inline double pareto_quantile(const StableParams& p, double u) {
    require_domain(u > 0.0 && u < 1.0, "pareto_quantile: u must lie in (0,1)");
    if (u >= 0.5) return p.lambda * (std::pow(2.0 * (1.0 - u), -1.0 / p.alpha) - 1.0);
    return -p.lambda * (std::pow(2.0 * u, -1.0 / p.alpha) - 1.0);
}

inline std::vector<double> pareto_sampler(const StableParams& p, std::size_t count,
                                          std::uint64_t seed) {
    std::vector<double> out(count);
    const std::size_t n_tasks = std::max<std::size_t>(1, std::min<std::size_t>(64, count / 4096));
    const std::size_t block = (count + n_tasks - 1) / n_tasks;
    parallel_tasks(n_tasks, [&](std::size_t task) {
        rng_stream rng = substream(seed, 0x9A3E, task);
        const std::size_t lo = task * block;
        const std::size_t hi = std::min(count, lo + block);
        for (std::size_t r = lo; r < hi; ++r) out[r] = pareto_quantile(p, rng.uniform01());
    });
    return out;
}

// a_1(x) = a_2(-x) = x^alpha/(2(1+x/lambda)^alpha) - c; vanishes at infinity,
// x a_1(x) -> -c alpha lambda.
inline double a_functions(const StableParams& p, double x) {
    require_domain(x != 0.0, "a_functions: x must be nonzero");
    const double ax = std::abs(x);
    return 0.5 * std::pow(ax / (1.0 + ax / p.lambda), p.alpha) - p.c;
}

// Grid-scan sup norms with a 10% margin; |a_1| is monotone toward c and
// |x a_1(x)| toward c alpha lambda, both checked in tests.
struct AFunctionNorms {
    double a_inf = 0.0;    // ||a_1||_inf = ||a_2||_inf
    double xa_inf = 0.0;   // ||x a_1(x)||_inf
};

inline AFunctionNorms a_function_norms(const StableParams& p) {
    AFunctionNorms norms;
    for (double x : logspace(1e-6, 1e8, 400)) {
        const double a = std::abs(a_functions(p, x));
        norms.a_inf = std::max(norms.a_inf, a);
        norms.xa_inf = std::max(norms.xa_inf, x * a);
    }
    norms.a_inf *= 1.1;
    norms.xa_inf *= 1.1;
    return norms;
}

// ---------------------------------------------------------------------------
// Oscillatory expectations against the Pareto density
// ---------------------------------------------------------------------------

namespace detail {

// int_X^infty g(x) e^{i xi x} dx ~ e^{i xi X} [-g/(i xi) + g'/(i xi)^2 - g''/(i xi)^3]
// for smooth monotone-decaying g; the residual is O(|g'''(X)|/xi^4).
inline cdouble osc_tail(double g0, double g1, double g2, double X, double xi) {
    const cdouble den(0.0, xi);
    return std::exp(cdouble(0.0, xi * X)) *
           (-g0 / den + g1 / (den * den) - g2 / (den * den * den));
}

}  // namespace detail

// E[e^{i xi X}] = 2 int_0^inf cos(xi x) f(x) dx for the symmetric Pareto law:
// chunked quadrature to X0 = 1000 max(lambda,1)/|xi|, then the integration-by-
// parts tail.
inline double pareto_cf(const StableParams& p, double xi, double tol = 1e-10) {
    if (xi == 0.0) return 1.0;
    const double a = std::abs(xi);
    const double X0 = 1000.0 * std::max(p.lambda, 1.0) / a;
    auto integrand = [&](double x) { return std::cos(a * x) * pareto_density(p, x); };
    auto body = integrate_oscillatory<double>(integrand, 0.0, X0, kPi / a, tol);
    // density derivatives for the tail expansion
    const double C = 0.5 * p.alpha / p.lambda;
    const double base = 1.0 + X0 / p.lambda;
    const double f0 = C * std::pow(base, -p.alpha - 1.0);
    const double f1 = -C * (p.alpha + 1.0) / p.lambda * std::pow(base, -p.alpha - 2.0);
    const double f2 =
        C * (p.alpha + 1.0) * (p.alpha + 2.0) / (p.lambda * p.lambda) *
        std::pow(base, -p.alpha - 3.0);
    const double tail = detail::osc_tail(f0, f1, f2, X0, a).real();
    return 2.0 * (body.value + tail);
}

// phi*_X(xi) = (-xi/(alpha |xi|^alpha)) E[iX e^{i xi X}]
//            = (2 xi/(alpha |xi|^alpha)) int_0^inf x f(x) sin(xi x) dx;
// real and even for this symmetric family.
inline double phi_star(const StableParams& p, double xi, double tol = 1e-10) {
    require_domain(xi != 0.0, "phi_star: xi must be nonzero");
    const double a = std::abs(xi);
    const double X0 = 1000.0 * std::max(p.lambda, 1.0) / a;
    auto integrand = [&](double x) { return x * pareto_density(p, x) * std::sin(a * x); };
    auto body = integrate_oscillatory<double>(integrand, 0.0, X0, kPi / a, tol);
    const double C = 0.5 * p.alpha / p.lambda;
    const double base = 1.0 + X0 / p.lambda;
    auto g = [&](double x, double b) { return x * C * std::pow(b, -p.alpha - 1.0); };
    const double g0 = g(X0, base);
    const double g1 = C * std::pow(base, -p.alpha - 1.0) -
                      X0 * C * (p.alpha + 1.0) / p.lambda * std::pow(base, -p.alpha - 2.0);
    const double g2 = -2.0 * C * (p.alpha + 1.0) / p.lambda * std::pow(base, -p.alpha - 2.0) +
                      X0 * C * (p.alpha + 1.0) * (p.alpha + 2.0) / (p.lambda * p.lambda) *
                          std::pow(base, -p.alpha - 3.0);
    const double tail = detail::osc_tail(g0, g1, g2, X0, a).imag();
    return 2.0 / (p.alpha * std::pow(a, p.alpha - 1.0)) * (body.value + tail);
}

// ---------------------------------------------------------------------------
// Dawson bound and the explicit CF-difference bound
// ---------------------------------------------------------------------------

// e^{-xi^alpha} int_0^xi e^{nu^alpha} dnu <= C1(alpha) e^{-xi^alpha} (+ xi^{1-alpha}
// for xi > 1); C1 is the exact sup int_0^1 e^{nu^alpha} dnu.
inline double stable_dawson_c1(double alpha) {
    return integrate_or_throw<double>(
        [alpha](double nu) { return std::exp(std::pow(nu, alpha)); }, 0.0, 1.0, 1e-12);
}

inline double stable_dawson_bound(double alpha, double xi, double c1 = 0.0) {
    require_domain(xi > 0, "stable_dawson_bound: xi must be positive");
    if (c1 == 0.0) c1 = stable_dawson_c1(alpha);
    const double base = c1 * std::exp(-std::pow(xi, alpha));
    return xi > 1.0 ? base + std::pow(xi, 1.0 - alpha) : base;
}

// Proof-tracked constants of the closed CF-difference bound.
struct StableBoundConstants {
    StableParams params;
    AFunctionNorms norms;
    double c1 = 0.0;       // dawson constant
    double c_a = 0.0;      // coefficient of xi^{2 alpha - 1} / n
    double c_b = 0.0;      // coefficient of xi^{alpha/2} / n^{1/alpha - 1/2}
    double c_c = 0.0;      // coefficient of xi / n^{2/alpha - 1}
};

inline StableBoundConstants stable_bound_constants(const StableParams& p) {
    StableBoundConstants k;
    k.params = p;
    k.norms = a_function_norms(p);
    k.c1 = stable_dawson_c1(p.alpha);
    const double alpha = p.alpha;
    // |phi_X(u) - 1| <= u^alpha (1 + J (||a1|| + ||a2||)),
    // J = int_0^inf min(x,2) x^{-alpha} dx
    const double J = std::pow(2.0, 2.0 - alpha) / (2.0 - alpha) +
                     2.0 * std::pow(2.0, 1.0 - alpha) / (alpha - 1.0);
    k.c_a = 1.0 + J * 2.0 * k.norms.a_inf;
    // |R^alpha(u)| <= (2/alpha)[ C1 u^{(2-alpha)/2} + C2 u^{2-alpha} ]
    const double c1_split = (1.0 / (2.0 - alpha) + 1.0 / alpha) *
                            std::pow(k.norms.a_inf, alpha / 2.0) *
                            std::pow(2.0 * k.norms.xa_inf, 1.0 - alpha / 2.0);
    const double c2_split = (1.0 / (2.0 - alpha) + 1.0 / (alpha - 1.0)) *
                            std::pow(k.norms.a_inf, alpha - 1.0) *
                            std::pow(k.norms.xa_inf, 2.0 - alpha);
    k.c_b = 2.0 / alpha * c1_split;
    k.c_c = 2.0 / alpha * c2_split;
    return k;
}

// C_alpha (|xi|^alpha/n + |xi|^{1-alpha/2}/n^{1/alpha-1/2} + |xi|^{2-alpha}/n^{2/alpha-1})
// assembled as alpha * dawson_bound(xi) * pointwise term.
inline double stable_closed_bound(const StableBoundConstants& k, long long n, double xi) {
    require_domain(xi > 0 && n >= 1, "stable_closed_bound: need xi > 0, n >= 1");
    const double alpha = k.params.alpha;
    const double nn = double(n);
    const double pointwise =
        k.c_a * std::pow(xi, 2.0 * alpha - 1.0) / nn +
        k.c_b * std::pow(xi, alpha / 2.0) / std::pow(nn, 1.0 / alpha - 0.5) +
        k.c_c * xi / std::pow(nn, 2.0 / alpha - 1.0);
    return alpha * stable_dawson_bound(alpha, xi, k.c1) * pointwise;
}

struct StableCfDiff {
    cdouble exact_representation;
    double closed_bound = 0.0;
};

// phi_W(xi) - e^{-xi^alpha} through the integral representation
//   alpha e^{-xi^alpha} int_0^xi nu^{alpha-1} e^{nu^alpha} phi_X^{n-1}(u)
//                        (phi_X - phi*_X)(u) dnu,   u = nu/n^{1/alpha},
// next to the certified closed bound.
inline StableCfDiff stable_cf_diff(const StableBoundConstants& k, long long n, double xi,
                                   double tol = 1e-9) {
    require_domain(xi > 0, "stable_cf_diff: xi must be positive");
    require_domain(n >= 1, "stable_cf_diff: n must be >= 1");
    const StableParams& p = k.params;
    const double alpha = p.alpha;
    const double scale = std::pow(double(n), -1.0 / alpha);
    const double xi_a = std::pow(xi, alpha);
    auto integrand = [&](double nu) -> cdouble {
        if (nu == 0.0) return {0.0, 0.0};
        const double u = nu * scale;
        const double phi_x = pareto_cf(p, u, tol * 1e-2);
        const double star = phi_star(p, u, tol * 1e-2);
        const double weight =
            alpha * std::pow(nu, alpha - 1.0) * std::exp(std::pow(nu, alpha) - xi_a);
        return cdouble(weight * std::pow(phi_x, double(n - 1)) * (phi_x - star), 0.0);
    };
    StableCfDiff out;
    out.exact_representation =
        integrate_or_throw<cdouble>(integrand, 0.0, xi, tol, 48, std::max(8, int(xi)));
    out.closed_bound = stable_closed_bound(k, n, xi);
    return out;
}

}  // namespace steincf
