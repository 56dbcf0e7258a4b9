#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/targets.hpp"

namespace steincf {

// L_infty phi = phi' - (phi_infty'/phi_infty) phi. Annihilates the target's
// own CF.
inline cdouble l_operator(const CharFn& phi, const TargetSpec& target, double t) {
    if (!phi.has_deriv()) throw capability_error("l_operator: phi carries no derivative");
    return phi.deriv(t) - target_log_deriv(target, t) * phi.eval(t);
}

// Generalized Dawson function |phi(xi)| int_0^xi dt/|phi(t)|, evaluated in
// log form so 1/|phi| never overflows: integrand exp(L(xi)-L(t)) with
// L = log|phi| nonincreasing in |t|.
inline double dawson_fn_from_log_abs(const std::function<double(double)>& log_abs_phi,
                                     double xi, double tol = 1e-10) {
    require_domain(xi >= 0, "dawson_fn: xi must be >= 0");
    if (xi == 0.0) return 0.0;
    const double L_xi = log_abs_phi(xi);
    auto integrand = [&](double t) { return std::exp(L_xi - log_abs_phi(t)); };
    return integrate_or_throw<double>(integrand, 0.0, xi, tol);
}

inline double dawson_fn(const TargetSpec& target, double xi, double tol = 1e-10) {
    validate(target);
    return dawson_fn_from_log_abs(
        [&](double t) { return target_log_cf(target, t).real(); }, xi, tol);
}

// Levy |phi| = e^{-|t|} fixture (alpha = 1 sits outside the supported stable
// range; closed form D(xi) = 1 - e^{-xi}).
inline double dawson_fn_levy_fixture(double xi, double tol = 1e-10) {
    return dawson_fn_from_log_abs([](double t) { return -std::abs(t); }, xi, tol);
}

struct DawsonCurve {
    TargetSpec target;
    std::vector<double> grid;
    std::vector<double> values;
};

inline DawsonCurve dawson_curve(const TargetSpec& target, std::vector<double> grid,
                                double tol = 1e-10) {
    DawsonCurve out{target, std::move(grid), {}};
    out.values.reserve(out.grid.size());
    for (double xi : out.grid) out.values.push_back(dawson_fn(target, xi, tol));
    return out;
}

// D_infty f (t) = phi_infty(t) int_0^t f(xi)/phi_infty(xi) dxi, oriented for
// t < 0. The ratio is formed as exp(log phi(t) - log phi(xi)); |ratio| <= 1
// on the integration path for every supported target.
inline cdouble d_operator(const TargetSpec& target, const std::function<cdouble(double)>& f,
                          double t, double tol = 1e-10, double freq_hint = 8.0) {
    validate(target);
    if (t == 0.0) return {0.0, 0.0};
    const cdouble log_phi_t = target_log_cf(target, t);
    auto integrand = [&](double xi) {
        return f(xi) * std::exp(log_phi_t - target_log_cf(target, xi));
    };
    const double chunk = kPi / std::max(1.0, freq_hint);
    auto r = integrate_oscillatory<cdouble>(integrand, std::min(0.0, t), std::max(0.0, t),
                                            chunk, tol);
    if (!r.converged) throw numeric_error("d_operator: quadrature failed", r.error_estimate);
    return t > 0 ? r.value : -r.value;
}

// Self-test of the factorization: max over the grid of
// |(phi - phi_infty)(t) - D_infty(L_infty phi)(t)|.
inline double factorization_residual(const TargetSpec& target, const CharFn& phi,
                                     const std::vector<double>& grid, double tol = 1e-9,
                                     double freq_hint = 8.0) {
    const CharFn phi_inf = target_cf(target);
    auto lphi = [&](double xi) { return l_operator(phi, target, xi); };
    double worst = 0.0;
    for (double t : grid) {
        const cdouble direct = phi.eval(t) - phi_inf.eval(t);
        const cdouble integrated = d_operator(target, lphi, t, tol, freq_hint);
        worst = std::max(worst, std::abs(direct - integrated));
    }
    return worst;
}

}  // namespace steincf
