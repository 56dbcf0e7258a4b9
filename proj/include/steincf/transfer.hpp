#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"

namespace steincf {

// (H1): |psi(xi) - phi(xi)| <= Cprime * eps * |xi|^p with eps in (0,1).
struct CfBoundHypothesis {
    double cprime = 1.0;
    int p = 0;
    double eps = 0.5;

    void check() const {
        require_domain(cprime > 0, "CfBoundHypothesis: Cprime must be positive");
        require_domain(p >= 0, "CfBoundHypothesis: p must be >= 0");
        require_domain(eps > 0 && eps < 1, "CfBoundHypothesis: eps must lie in (0,1)");
    }
};

// (H2): P[|X|>A] <= C e^{-lambda A^alpha} for both laws.
struct SubExponentialTail {
    double C = 1.0;
    double lambda = 1.0;
    double alpha = 1.0;

    void check() const {
        require_domain(C > 0 && lambda > 0 && alpha > 0,
                       "SubExponentialTail: parameters must be positive");
    }
};

// (H2'): P[|X|>A] <= C A^{-gamma} for both laws.
struct PolynomialTail {
    double C = 1.0;
    double gamma = 1.0;

    void check() const {
        require_domain(C > 0 && gamma > 0, "PolynomialTail: parameters must be positive");
    }
};

// Smoothing constants C_p (the proof's K_{p+1}; same index convention as the
// printed table C_0=3, C_1=12, C_2=100). Larger p needs a caller-supplied
// constant.
inline double smoothing_constant(int p, std::optional<double> override_cp = std::nullopt) {
    if (override_cp) {
        require_domain(*override_cp > 0, "smoothing constant must be positive");
        return *override_cp;
    }
    switch (p) {
        case 0: return 3.0;
        case 1: return 12.0;
        case 2: return 100.0;
        default:
            throw capability_error(
                "smoothing constant known only for p in {0,1,2}; supply C_p explicitly");
    }
}

// W_{p+1}(X,Y) <= 2 eps [ C + 2^{p-1} sqrt(10) C' C_p / pi *
//                         sqrt(1 + (lambda^{-1} ln(1/eps))^{1/alpha}) ].
inline double smooth_wasserstein_bound_exp(const CfBoundHypothesis& h1,
                                           const SubExponentialTail& h2,
                                           std::optional<double> override_cp = std::nullopt) {
    h1.check();
    h2.check();
    const double cp = smoothing_constant(h1.p, override_cp);
    const double M = std::pow(std::log(1.0 / h1.eps) / h2.lambda, 1.0 / h2.alpha);
    const double smoothing = std::pow(2.0, h1.p - 1) * std::sqrt(10.0) * h1.cprime * cp / kPi;
    return 2.0 * h1.eps * (h2.C + smoothing * std::sqrt(1.0 + M));
}

// Validity threshold of the polynomial-tail transfer (equivalent to M > 1 in
// the optimization below).
inline double poly_validity_threshold(int p, const PolynomialTail& h2,
                                      std::optional<double> override_cp = std::nullopt) {
    const double cp = smoothing_constant(p, override_cp);
    return kPi * std::sqrt(5.0) * h2.gamma * h2.C / (5.0 * std::pow(2.0, p) * cp);
}

// Polynomial-tail transfer in the proof's optimized form:
//   M = (eps 2^p sqrt5 C_p / (gamma C pi))^{-2/(2gamma+1)},
//   bound = eps 2^{p+1} sqrt(5M) C_p / pi + 2 C M^{-gamma}.
// The displayed theorem keeps an unoptimized sqrt(M); the optimization is
// what pins it down.
inline double smooth_wasserstein_bound_poly(const CfBoundHypothesis& h1,
                                            const PolynomialTail& h2,
                                            std::optional<double> override_cp = std::nullopt) {
    h1.check();
    h2.check();
    const double cp = smoothing_constant(h1.p, override_cp);
    const double threshold = poly_validity_threshold(h1.p, h2, override_cp);
    if (!(h1.eps < threshold))
        throw infeasibility_error("smooth_wasserstein_bound_poly: eps above validity threshold",
                                  threshold);
    const double base = h1.eps * std::pow(2.0, h1.p) * std::sqrt(5.0) * cp /
                        (h2.gamma * h2.C * kPi);
    const double M = std::pow(base, -2.0 / (2.0 * h2.gamma + 1.0));
    return h1.eps * std::pow(2.0, h1.p + 1) * std::sqrt(5.0 * M) * cp / kPi +
           2.0 * h2.C * std::pow(M, -h2.gamma);
}

// The same closed form without the M > 1 gate; used to report the asymptotic
// value at sample sizes where the gate cannot yet hold.
inline double smooth_wasserstein_poly_asymptotic(const CfBoundHypothesis& h1,
                                                 const PolynomialTail& h2,
                                                 std::optional<double> override_cp =
                                                     std::nullopt) {
    h1.check();
    h2.check();
    const double cp = smoothing_constant(h1.p, override_cp);
    const double base = h1.eps * std::pow(2.0, h1.p) * std::sqrt(5.0) * cp /
                        (h2.gamma * h2.C * kPi);
    const double M = std::pow(base, -2.0 / (2.0 * h2.gamma + 1.0));
    return h1.eps * std::pow(2.0, h1.p + 1) * std::sqrt(5.0 * M) * cp / kPi +
           2.0 * h2.C * std::pow(M, -h2.gamma);
}

// Esseen smoothing inequality
//   Kol <= (1/pi) int_{-T}^{T} |Delta(t)/t| dt + 24 m / (pi T),
// with the integral folded to 2 int_0^T by symmetry.
inline double esseen_kolmogorov_bound(const std::function<double(double)>& cf_diff_over_t,
                                      double m, double T, double tol = 1e-9) {
    require_domain(m > 0, "esseen_kolmogorov_bound: density bound m must be positive");
    require_domain(T > 0, "esseen_kolmogorov_bound: T must be positive");
    const double integral =
        integrate_or_throw<double>(cf_diff_over_t, 0.0, T, tol, 48, 16);
    return 2.0 * integral / kPi + 24.0 * m / (kPi * T);
}

// Golden-section optimization of T on a log scale; never worse than either
// endpoint.
inline std::pair<double, double> optimize_esseen_T(
    const std::function<double(double)>& cf_diff_over_t, double m, double T_min, double T_max,
    double tol = 1e-9) {
    require_domain(T_min > 0 && T_min < T_max, "optimize_esseen_T: need 0 < Tmin < Tmax");
    auto objective = [&](double logT) {
        return esseen_kolmogorov_bound(cf_diff_over_t, m, std::exp(logT), tol);
    };
    auto [logT, value] = golden_section_min(objective, std::log(T_min), std::log(T_max), 1e-8);
    const double at_min = objective(std::log(T_min));
    const double at_max = objective(std::log(T_max));
    double T_star = std::exp(logT);
    if (at_min < value) {
        T_star = T_min;
        value = at_min;
    }
    if (at_max < value) {
        T_star = T_max;
        value = at_max;
    }
    return {T_star, value};
}

// Markov: P[X > A] <= e^{-gamma A} E[e^{gamma X}], so each grid point gamma
// certifies the pair (C = mgf_bound(gamma), lambda = gamma, alpha = 1). The
// largest finite grid point wins asymptotically and is returned. Two-sided
// laws need the caller to pass the two-sided mgf bound.
inline SubExponentialTail estimate_subexp_tail(const std::function<double(double)>& mgf_bound,
                                               const std::vector<double>& gamma_grid) {
    require_domain(!gamma_grid.empty(), "estimate_subexp_tail: empty gamma grid");
    double best_gamma = 0.0;
    double best_C = 0.0;
    for (double g : gamma_grid) {
        require_domain(g > 0, "estimate_subexp_tail: gamma grid must be positive");
        const double c = mgf_bound(g);
        if (!std::isfinite(c)) continue;
        if (g > best_gamma) {
            best_gamma = g;
            best_C = c;
        }
    }
    require_domain(best_gamma > 0, "estimate_subexp_tail: mgf bound infinite on entire grid");
    return SubExponentialTail{best_C, best_gamma, 1.0};
}

// ---------------------------------------------------------------------------
// Experiment record
// ---------------------------------------------------------------------------

struct BoundReport {
    long long n = 0;
    double epsilon = 0.0;
    double delta_n = 0.0;
    int wasserstein_order = 0;
    double wasserstein_bound = 0.0;
    std::optional<double> kolmogorov_bound;
    std::optional<double> empirical_kolmogorov;
    std::map<std::string, std::string> meta;
};

}  // namespace steincf
