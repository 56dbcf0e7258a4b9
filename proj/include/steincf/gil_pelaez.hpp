#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/targets.hpp"

namespace steincf {

// Mean implied by phi'(0); falls back to a numeric derivative.
inline double cf_mean(const CharFn& cf) {
    if (cf.has_deriv()) return cf.deriv(0.0).imag();
    return differentiate([&](double t) { return cf.eval(t); }, 0.0, 1e-5).imag();
}

// CDF by inversion: 1/2 - (1/pi) int_0^T Im(e^{-itx} phi(t))/t dt.
// The t=0 singularity is removable; the integrand is extended by its limit
// (mu - x). The integral is split at half-periods of the dominant phase and
// each chunk integrated adaptively. Result clamped to [0,1].
inline double gil_pelaez_cdf(const CharFn& cf, double x, double truncation, double tol,
                             double freq_hint = 0.0) {
    require_domain(truncation > 0, "gil_pelaez_cdf: truncation must be positive");
    const double mu = cf_mean(cf);
    auto integrand = [&](double t) -> double {
        if (t == 0.0) return mu - x;
        const cdouble v = std::exp(cdouble(0.0, -t * x)) * cf.eval(t);
        return v.imag() / t;
    };
    const double freq = std::max({1.0, std::abs(x), freq_hint});
    auto r = integrate_oscillatory<double>(integrand, 0.0, truncation, kPi / freq, tol);
    if (!r.converged)
        throw numeric_error("gil_pelaez_cdf: quadrature did not converge", r.error_estimate);
    return std::clamp(0.5 - r.value / kPi, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Tabulated CDFs for bulk evaluation (ECDF comparisons, density scans)
// ---------------------------------------------------------------------------

// Monotone piecewise-linear CDF table with optional analytic tails.
struct CdfTable {
    std::vector<double> xs;
    std::vector<double> values;
    std::function<double(double)> lower_tail;  // used for x < xs.front()
    std::function<double(double)> upper_tail;  // used for x > xs.back()

    double operator()(double x) const {
        if (x < xs.front()) return lower_tail ? std::clamp(lower_tail(x), 0.0, 1.0) : 0.0;
        if (x > xs.back()) return upper_tail ? std::clamp(upper_tail(x), 0.0, 1.0) : 1.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t hi = std::min<std::size_t>(it - xs.begin(), xs.size() - 1);
        if (hi == 0) return values.front();
        const std::size_t lo = hi - 1;
        const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return values[lo] + w * (values[hi] - values[lo]);
    }
};

inline CdfTable make_cdf_table(const std::function<double(double)>& cdf, double x_lo,
                               double x_hi, std::size_t n_nodes) {
    CdfTable t;
    t.xs = linspace(x_lo, x_hi, n_nodes);
    t.values.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) t.values[i] = cdf(t.xs[i]);
    // enforce monotonicity against quadrature jitter
    for (std::size_t i = 1; i < n_nodes; ++i)
        t.values[i] = std::max(t.values[i], t.values[i - 1]);
    for (double& v : t.values) v = std::clamp(v, 0.0, 1.0);
    return t;
}

namespace detail {

// K_m = int_T^inf t^{-base-m} e^{-itx} dt by repeated integration by parts;
// three terms leave a remainder below (base+1)(base+2)(base+3)/(x^3 T^{base+3}).
inline cdouble ibp_tail(double base, double x, double T, int terms = 3) {
    cdouble acc(0.0, 0.0);
    cdouble factor(1.0, 0.0);
    const cdouble phase = std::exp(cdouble(0.0, -T * x));
    double expo = base;
    for (int m = 0; m < terms; ++m) {
        const cdouble term = factor * std::pow(T, -expo) * phase / cdouble(0.0, x);
        acc += term;
        factor *= -expo / cdouble(0.0, x);
        expo += 1.0;
    }
    return acc;
}

}  // namespace detail

// Dickman CDF at one point. |phi| decays only like t^{-theta}; the body is
// integrated to T and the remainder added from the asymptotic
// phi(t) ~ e^{-theta gamma} t^{-theta} e^{i theta pi/2}, which integrates by
// parts to O(theta/(x^2 T^{theta+2})) accuracy.
inline double dickman_cdf_point(double theta, double x, double truncation = 300.0,
                                double tol = 1e-8) {
    if (x <= 0.0) return 0.0;
    const CharFn cf = target_cf(DickmanTarget{theta});
    auto integrand = [&](double t) -> double {
        if (t == 0.0) return theta - x;  // mean is theta
        const cdouble v = std::exp(cdouble(0.0, -t * x)) * cf.eval(t);
        return v.imag() / t;
    };
    const double freq = std::max(1.0, x);
    auto body = integrate_oscillatory<double>(integrand, 0.0, truncation, kPi / freq, tol);
    const double tail =
        std::exp(-theta * kEulerGamma) *
        (std::exp(cdouble(0.0, theta * kPi / 2.0)) *
         detail::ibp_tail(theta + 1.0, x, truncation))
            .imag();
    return std::clamp(0.5 - (body.value + tail) / kPi, 0.0, 1.0);
}

// Shared-node CDF evaluation: Gauss-Legendre panels sized for the largest
// query frequency, coefficients w_j phi(t_j)/t_j precomputed once; each
// query point then costs one pass of complex exponentials plus the analytic
// tail. Cross-validated against the adaptive path in tests.
class batch_cf_cdf {
public:
    batch_cf_cdf(const CharFn& cf, double max_freq, double truncation, double tail_base,
                 double tail_scale)
        : tail_base_(tail_base), tail_scale_(tail_scale), truncation_(truncation) {
        // 8-point GL per quarter-period of the fastest oscillation
        static constexpr double kAbscissa[4] = {0.1834346424956498, 0.5255324099163290,
                                                0.7966664774136267, 0.9602898564975363};
        static constexpr double kWeight[4] = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};
        const double panel = kPi / (2.0 * std::max(1.0, max_freq));
        const std::size_t n_panels = std::size_t(truncation / panel) + 1;
        nodes_.reserve(8 * n_panels);
        coeffs_.reserve(8 * n_panels);
        double a = 0.0;
        for (std::size_t p = 0; p < n_panels && a < truncation; ++p) {
            const double b = std::min(truncation, a + panel);
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int k = 0; k < 4; ++k) {
                for (double sgn : {-1.0, 1.0}) {
                    const double t = mid + sgn * half * kAbscissa[k];
                    nodes_.push_back(t);
                    coeffs_.push_back(half * kWeight[k] * cf.eval(t) / t);
                }
            }
            a = b;
        }
    }

    double operator()(double x) const {
        kahan_sum body;
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            const double c = std::cos(nodes_[j] * x), s = std::sin(nodes_[j] * x);
            // Im(e^{-itx} coeff)
            body.add(coeffs_[j].imag() * c - coeffs_[j].real() * s);
        }
        double tail = 0.0;
        if (tail_scale_ != 0.0 && x > 0.0)
            tail = (std::exp(cdouble(0.0, (tail_base_ - 1.0) * kPi / 2.0)) *
                    detail::ibp_tail(tail_base_, x, truncation_))
                       .imag() *
                   tail_scale_;
        return std::clamp(0.5 - (body.value() + tail) / kPi, 0.0, 1.0);
    }

private:
    std::vector<double> nodes_;
    std::vector<cdouble> coeffs_;
    double tail_base_;
    double tail_scale_;
    double truncation_;
};

inline CdfTable dickman_cdf_table(double theta, std::size_t n_nodes = 1400,
                                  double truncation = 300.0) {
    // extend until the remaining upper mass is negligible (superexponential tail)
    double x_hi = std::max(8.0, 4.0 * theta);
    while (dickman_cdf_point(theta, x_hi, truncation, 1e-6) < 1.0 - 1e-8 && x_hi < 64.0)
        x_hi *= 1.5;
    const CharFn cf = target_cf(DickmanTarget{theta});
    batch_cf_cdf batch(cf, x_hi, truncation, theta + 1.0, std::exp(-theta * kEulerGamma));
    auto table = make_cdf_table([&](double x) { return x <= 0 ? 0.0 : batch(x); }, 0.0, x_hi,
                                n_nodes);
    table.lower_tail = [](double) { return 0.0; };
    table.upper_tail = [](double) { return 1.0; };
    return table;
}

// Symmetric alpha-stable CDF table; the CF decays like e^{-t^alpha}, so the
// t-integral is cheap, and beyond the table the first-order tail
// P(Z > x) ~ c x^{-alpha} with c = Gamma(alpha) sin(pi alpha / 2) / pi.
inline CdfTable stable_cdf_table(double alpha, double x_hi = 50.0,
                                 std::size_t n_nodes = 4000) {
    const CharFn cf = target_cf(StableTarget{alpha});
    const double T = std::pow(34.5, 1.0 / alpha);  // e^{-T^alpha} < 1e-15
    auto cdf = [&](double x) { return gil_pelaez_cdf(cf, x, T, 1e-10); };
    auto table = make_cdf_table(cdf, -x_hi, x_hi, n_nodes);
    const double c_tail = std::tgamma(alpha) * std::sin(kPi * alpha / 2.0) / kPi;
    table.lower_tail = [c_tail, alpha](double x) {
        return c_tail * std::pow(-x, -alpha);
    };
    table.upper_tail = [c_tail, alpha](double x) {
        return 1.0 - c_tail * std::pow(x, -alpha);
    };
    return table;
}

// ---------------------------------------------------------------------------
// Density bounds m for Esseen's inequality (numeric values carry a 5% margin)
// ---------------------------------------------------------------------------

inline double gaussian_density_bound() { return 1.0 / std::sqrt(2.0 * kPi); }

// Max over a grid of the inverted density (1/pi)[int_0^T Re(e^{-itx} phi) dt
// + asymptotic tail]. Defined for theta >= 1 (below that the density blows
// up at 0).
inline double dickman_density_bound(double theta, double truncation = 500.0) {
    require_domain(theta >= 1.0, "dickman_density_bound: needs theta >= 1");
    const CharFn cf = target_cf(DickmanTarget{theta});
    auto density = [&](double x) {
        auto integrand = [&](double t) {
            return (std::exp(cdouble(0.0, -t * x)) * cf.eval(t)).real();
        };
        const double freq = std::max(1.0, x);
        auto r = integrate_oscillatory<double>(integrand, 0.0, truncation, kPi / freq, 1e-6);
        const double tail = std::exp(-theta * kEulerGamma) *
                            (std::exp(cdouble(0.0, theta * kPi / 2.0)) *
                             detail::ibp_tail(theta, x, truncation))
                                .real();
        return (r.value + tail) / kPi;
    };
    double m = 0.0;
    for (double x = 0.05; x <= 3.0 + theta; x += 0.05) m = std::max(m, density(x));
    return 1.05 * m;
}

// Stable density peaks at 0: f(0) = (1/pi) int_0^inf e^{-t^alpha} dt.
inline double stable_density_bound(double alpha) {
    const double T = std::pow(60.0, 1.0 / alpha);
    const double v =
        integrate_or_throw<double>([alpha](double t) { return std::exp(-std::pow(t, alpha)); },
                                   0.0, T, 1e-12) /
        kPi;
    return 1.05 * v;
}

// For q >= 3 the density is bounded by (1/2pi) int |phi|, which is finite by
// the envelope |phi| <= (1+4 lambda_min^2 t^2)^{-q/4}; the tail beyond T is
// added from that envelope in closed form.
inline double second_chaos_density_bound(const ChaosParams& p) {
    validate(p);
    require_domain(p.q() >= 3, "second_chaos_density_bound: needs q >= 3");
    const double lmin = p.lambda_abs_min();
    const double q = double(p.q());
    const double T = 50.0 / (2.0 * lmin);
    const double body = integrate_or_throw<double>(
        [&](double t) { return std::exp(second_chaos_log_cf(p, t).real()); }, 0.0, T, 1e-10);
    const double tail =
        std::pow(2.0 * lmin, -q / 2.0) * std::pow(T, 1.0 - q / 2.0) / (q / 2.0 - 1.0);
    return 1.05 * (body + tail) / kPi;
}

}  // namespace steincf
