#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"

namespace steincf {

// ---------------------------------------------------------------------------
// Target laws
// ---------------------------------------------------------------------------

struct GaussianTarget {};

struct GammaTarget {
    double shape = 1.0;
    double rate = 1.0;
};

struct DickmanTarget {
    double theta = 1.0;
};

// Parameters of a second-Wiener-chaos law sum_k lambda_k * (chi2(m_k) - m_k):
// d blocks with pairwise distinct nonzero coefficients.
struct ChaosParams {
    std::vector<double> lambda;
    std::vector<int> multiplicity;

    int d() const { return int(lambda.size()); }
    int q() const {
        int s = 0;
        for (int m : multiplicity) s += m;
        return s;
    }
    double lambda_abs_min() const {
        double v = std::abs(lambda[0]);
        for (double l : lambda) v = std::min(v, std::abs(l));
        return v;
    }
    double lambda_abs_max() const {
        double v = 0.0;
        for (double l : lambda) v = std::max(v, std::abs(l));
        return v;
    }
    double m_dot_lambda() const {
        kahan_sum s;
        for (std::size_t k = 0; k < lambda.size(); ++k) s.add(lambda[k] * multiplicity[k]);
        return s.value();
    }
};

struct SecondChaosTarget {
    ChaosParams params;
};

struct StableTarget {
    double alpha = 1.5;
};

using TargetSpec =
    std::variant<GaussianTarget, GammaTarget, DickmanTarget, SecondChaosTarget, StableTarget>;

inline void validate(const GaussianTarget&) {}

inline void validate(const GammaTarget& g) {
    require_domain(g.shape > 0 && g.rate > 0, "Gamma target: shape and rate must be positive");
}

inline void validate(const DickmanTarget& d) {
    require_domain(d.theta > 0, "Dickman target: theta must be positive");
}

inline void validate(const ChaosParams& p) {
    require_domain(!p.lambda.empty(), "SecondChaos: d must be >= 1");
    require_domain(p.lambda.size() == p.multiplicity.size(),
                   "SecondChaos: lambda and multiplicity sizes differ");
    for (std::size_t i = 0; i < p.lambda.size(); ++i) {
        require_domain(p.lambda[i] != 0.0, "SecondChaos: lambda entries must be nonzero");
        require_domain(p.multiplicity[i] >= 1, "SecondChaos: multiplicities must be >= 1");
        for (std::size_t j = i + 1; j < p.lambda.size(); ++j)
            require_domain(p.lambda[i] != p.lambda[j],
                           "SecondChaos: lambda entries must be pairwise distinct");
    }
}

inline void validate(const SecondChaosTarget& t) { validate(t.params); }

inline void validate(const StableTarget& s) {
    require_domain(s.alpha > 1.0 && s.alpha < 2.0, "Stable target: alpha must be in (1,2)");
}

inline void validate(const TargetSpec& spec) {
    std::visit([](const auto& t) { validate(t); }, spec);
}

inline std::string target_name(const TargetSpec& spec) {
    struct V {
        std::string operator()(const GaussianTarget&) const { return "gaussian"; }
        std::string operator()(const GammaTarget&) const { return "gamma"; }
        std::string operator()(const DickmanTarget&) const { return "dickman"; }
        std::string operator()(const SecondChaosTarget&) const { return "second-chaos"; }
        std::string operator()(const StableTarget&) const { return "stable"; }
    };
    return std::visit(V{}, spec);
}

// ---------------------------------------------------------------------------
// Dickman inner integral  theta * int_0^1 (e^{itx}-1)/x dx
// ---------------------------------------------------------------------------

namespace detail {

#if defined(__SIZEOF_FLOAT128__)
using wide_real = __float128;
#else
using wide_real = long double;
#endif

// Power series sum_{k>=1} (it)^k / (k k!). The terms peak near k ~ |t| at
// magnitude ~ e^{|t|}/|t| before factorial decay, so partial sums cancel
// heavily; extended precision keeps the absolute error below ~1e-14 up to
// |t| = 30.
inline cdouble dickman_series(double t) {
    wide_real term_re = 0, term_im = 0;  // (it)^k / (k!)
    wide_real sum_re = 0, sum_im = 0;
    term_re = 1;                          // k = 0 seed for the recurrence
    const wide_real tw = t;
    const double abs_t = std::abs(t);
    for (int k = 1; k < 400; ++k) {
        // term <- term * (it) / k
        const wide_real nre = -term_im * tw / k;
        const wide_real nim = term_re * tw / k;
        term_re = nre;
        term_im = nim;
        sum_re += term_re / k;
        sum_im += term_im / k;
        if (k > abs_t) {
            const double mag = std::abs(double(term_re)) + std::abs(double(term_im));
            if (mag / k < 1e-17) break;
        }
    }
    return {double(sum_re), double(sum_im)};
}

// E(x) = int_x^infty e^{iu}/u du = E_1(-ix), modified Lentz continued
// fraction; accurate to ~1e-15 for x >= 10.
inline cdouble exp_integral_tail(double x) {
    const cdouble z(0.0, -x);
    const double fpmin = 1e-300;
    cdouble b = z + 1.0;
    cdouble c = 1.0 / fpmin;
    cdouble d = 1.0 / b;
    cdouble h = d;
    for (int i = 1; i < 200; ++i) {
        const double a = -double(i) * double(i);
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + a / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const cdouble delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    // E_1(z) = e^{-z} h with z = -ix, so e^{-z} = e^{ix}.
    return std::exp(cdouble(0.0, x)) * h;
}

// d/dt of the phase: (e^{it}-1)/t, with the analytic limit i at t=0.
inline cdouble dickman_phase_deriv(double t) {
    if (t == 0.0) return {0.0, 1.0};
    return (std::exp(cdouble(0.0, t)) - 1.0) / t;
}

// Cubic Hermite table of the phase on [0,30]; both endpoint values and
// derivatives are exact, so the interpolation error is ~(h^4/384) f'''' ~ 2e-12.
class dickman_phase_table {
public:
    static const dickman_phase_table& instance() {
        static const dickman_phase_table table;
        return table;
    }

    cdouble operator()(double t) const {
        const double s_full = t / kStep;
        std::size_t idx = std::size_t(s_full);
        if (idx >= kNodes - 1) idx = kNodes - 2;
        const double s = s_full - double(idx);
        const double s2 = s * s;
        const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        const double h10 = s * (1.0 - s) * (1.0 - s);
        const double h01 = s2 * (3.0 - 2.0 * s);
        const double h11 = s2 * (s - 1.0);
        return h00 * values_[idx] + (h10 * kStep) * derivs_[idx] + h01 * values_[idx + 1] +
               (h11 * kStep) * derivs_[idx + 1];
    }

private:
    static constexpr std::size_t kNodes = 4097;
    static constexpr double kStep = 30.0 / double(kNodes - 1);

    dickman_phase_table() : values_(kNodes), derivs_(kNodes) {
        for (std::size_t k = 0; k < kNodes; ++k) {
            const double t = double(k) * kStep;
            values_[k] = dickman_series(t);
            derivs_[k] = dickman_phase_deriv(t);
        }
    }

    std::vector<cdouble> values_;
    std::vector<cdouble> derivs_;
};

// Fast evaluator of int_0^1 (e^{itx}-1)/x dx valid on all of R:
// Hermite table up to |t| = 30, then -gamma - ln|t| + i pi/2 - E(|t|).
inline cdouble dickman_phase(double t) {
    const double a = std::abs(t);
    cdouble v;
    if (a <= 30.0) {
        v = dickman_phase_table::instance()(a);
    } else {
        v = cdouble(-kEulerGamma - std::log(a), kPi / 2) - exp_integral_tail(a);
    }
    return t >= 0 ? v : std::conj(v);
}

}  // namespace detail

// theta * int_0^1 (e^{itx}-1)/x dx. Series branch for |t| <= 30 (truncation
// tail < 1e-14); oscillation-split adaptive quadrature beyond.
inline cdouble dickman_inner_integral(double theta, double t) {
    require_domain(theta > 0, "dickman_inner_integral: theta must be positive");
    if (t == 0.0) return {0.0, 0.0};
    if (std::abs(t) <= 30.0) return theta * detail::dickman_series(t);
    auto integrand = [t](double x) -> cdouble {
        if (x == 0.0) return cdouble(0.0, t);
        return (std::exp(cdouble(0.0, t * x)) - 1.0) / x;
    };
    const double half_period = kPi / std::abs(t);
    auto r = integrate_oscillatory<cdouble>(integrand, 0.0, 1.0, half_period, 1e-12);
    if (!r.converged)
        throw numeric_error("dickman_inner_integral: quadrature failed", r.error_estimate);
    return theta * r.value;
}

// ---------------------------------------------------------------------------
// Exact target characteristic functions (analytic derivative included)
// ---------------------------------------------------------------------------

inline CharFn target_cf(const GaussianTarget&) {
    CharFn out;
    out.eval = [](double t) { return cdouble(std::exp(-0.5 * t * t), 0.0); };
    out.deriv = [](double t) { return cdouble(-t * std::exp(-0.5 * t * t), 0.0); };
    return out;
}

inline CharFn target_cf(const GammaTarget& g) {
    validate(g);
    const double k = g.shape, beta = g.rate;
    CharFn out;
    out.eval = [k, beta](double t) {
        return std::exp(-k * std::log(cdouble(1.0, -t / beta)));
    };
    out.deriv = [k, beta](double t) {
        const cdouble base(1.0, -t / beta);
        return std::exp(-k * std::log(base)) * cdouble(0.0, k / beta) / base;
    };
    return out;
}

inline CharFn target_cf(const DickmanTarget& d) {
    validate(d);
    const double theta = d.theta;
    CharFn out;
    out.eval = [theta](double t) { return std::exp(theta * detail::dickman_phase(t)); };
    out.deriv = [theta](double t) {
        const cdouble phi = std::exp(theta * detail::dickman_phase(t));
        if (t == 0.0) return cdouble(0.0, theta);
        // phi'/phi = i theta (e^{it}-1)/(it)
        return phi * theta * (std::exp(cdouble(0.0, t)) - 1.0) / t;
    };
    return out;
}

// Product formula exp(-i t <m,lambda>) prod (1-2it lambda_k)^{-m_k/2};
// log form keeps large q / large t away from overflow. Re(1-2it lambda) = 1,
// so the principal branch never crosses the cut.
inline cdouble second_chaos_log_cf(const ChaosParams& p, double t) {
    kahan_csum log_phi;
    log_phi.add(cdouble(0.0, -t * p.m_dot_lambda()));
    for (std::size_t j = 0; j < p.lambda.size(); ++j)
        log_phi.add(-0.5 * double(p.multiplicity[j]) *
                    std::log(cdouble(1.0, -2.0 * t * p.lambda[j])));
    return log_phi.value();
}

inline cdouble second_chaos_log_deriv(const ChaosParams& p, double t) {
    kahan_csum s;
    s.add(cdouble(0.0, -p.m_dot_lambda()));
    for (std::size_t j = 0; j < p.lambda.size(); ++j) {
        const double ml = p.multiplicity[j] * p.lambda[j];
        s.add(cdouble(0.0, ml) / cdouble(1.0, -2.0 * t * p.lambda[j]));
    }
    return s.value();
}

inline CharFn target_cf(const SecondChaosTarget& sc) {
    validate(sc);
    const ChaosParams p = sc.params;
    CharFn out;
    out.eval = [p](double t) { return std::exp(second_chaos_log_cf(p, t)); };
    out.deriv = [p](double t) {
        return std::exp(second_chaos_log_cf(p, t)) * second_chaos_log_deriv(p, t);
    };
    return out;
}

inline CharFn target_cf(const StableTarget& s) {
    validate(s);
    const double alpha = s.alpha;
    CharFn out;
    out.eval = [alpha](double t) {
        return cdouble(std::exp(-std::pow(std::abs(t), alpha)), 0.0);
    };
    out.deriv = [alpha](double t) {
        if (t == 0.0) return cdouble(0.0, 0.0);
        const double a = std::abs(t);
        return cdouble(-alpha * std::pow(a, alpha - 1.0) * sign(t) *
                           std::exp(-std::pow(a, alpha)),
                       0.0);
    };
    return out;
}

inline CharFn target_cf(const TargetSpec& spec) {
    validate(spec);
    return std::visit([](const auto& t) { return target_cf(t); }, spec);
}

// log phi_infty(t), principal branch; Re is log|phi| and is <= 0 for every
// supported target, which keeps ratios phi(t)/phi(s) overflow-free in exp form.
inline cdouble target_log_cf(const TargetSpec& spec, double t) {
    struct V {
        double t;
        cdouble operator()(const GaussianTarget&) const { return {-0.5 * t * t, 0.0}; }
        cdouble operator()(const GammaTarget& g) const {
            return -g.shape * std::log(cdouble(1.0, -t / g.rate));
        }
        cdouble operator()(const DickmanTarget& d) const {
            return d.theta * detail::dickman_phase(t);
        }
        cdouble operator()(const SecondChaosTarget& sc) const {
            return second_chaos_log_cf(sc.params, t);
        }
        cdouble operator()(const StableTarget& s) const {
            return {-std::pow(std::abs(t), s.alpha), 0.0};
        }
    };
    return std::visit(V{t}, spec);
}

// phi_infty'(t)/phi_infty(t) without forming the ratio of near-zero values.
inline cdouble target_log_deriv(const TargetSpec& spec, double t) {
    struct V {
        double t;
        cdouble operator()(const GaussianTarget&) const { return {-t, 0.0}; }
        cdouble operator()(const GammaTarget& g) const {
            return cdouble(0.0, g.shape / g.rate) / cdouble(1.0, -t / g.rate);
        }
        cdouble operator()(const DickmanTarget& d) const {
            if (t == 0.0) return {0.0, d.theta};
            return d.theta * (std::exp(cdouble(0.0, t)) - 1.0) / t;
        }
        cdouble operator()(const SecondChaosTarget& sc) const {
            return second_chaos_log_deriv(sc.params, t);
        }
        cdouble operator()(const StableTarget& s) const {
            if (t == 0.0) return {0.0, 0.0};
            return {-s.alpha * std::pow(std::abs(t), s.alpha - 1.0) * sign(t), 0.0};
        }
    };
    return std::visit(V{t}, spec);
}

// 1/phi_infty(t), via the log form where the direct value would under/overflow.
inline cdouble target_cf_reciprocal(const TargetSpec& spec, double t) {
    if (const auto* sc = std::get_if<SecondChaosTarget>(&spec))
        return std::exp(-second_chaos_log_cf(sc->params, t));
    if (const auto* d = std::get_if<DickmanTarget>(&spec))
        return std::exp(-d->theta * detail::dickman_phase(t));
    if (std::get_if<GaussianTarget>(&spec)) return {std::exp(0.5 * t * t), 0.0};
    if (const auto* s = std::get_if<StableTarget>(&spec))
        return {std::exp(std::pow(std::abs(t), s->alpha)), 0.0};
    const auto& g = std::get<GammaTarget>(spec);
    return std::exp(g.shape * std::log(cdouble(1.0, -t / g.rate)));
}

inline double target_cf_abs(const TargetSpec& spec, double t) {
    struct V {
        double t;
        double operator()(const GaussianTarget&) const { return std::exp(-0.5 * t * t); }
        double operator()(const GammaTarget& g) const {
            return std::pow(1.0 + t * t / (g.rate * g.rate), -0.5 * g.shape);
        }
        double operator()(const DickmanTarget& d) const {
            return std::exp(d.theta * detail::dickman_phase(t).real());
        }
        double operator()(const SecondChaosTarget& sc) const {
            return std::exp(second_chaos_log_cf(sc.params, t).real());
        }
        double operator()(const StableTarget& s) const {
            return std::exp(-std::pow(std::abs(t), s.alpha));
        }
    };
    return std::visit(V{t}, spec);
}

}  // namespace steincf
