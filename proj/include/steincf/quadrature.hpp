#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <utility>

#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"

namespace steincf {

template <class T>
struct quad_result {
    T value{};
    double error_estimate = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;
};

namespace detail {

template <class T>
double quad_abs(T v) {
    return std::abs(v);
}

// Adaptive Simpson with Richardson correction. Error target is absolute and
// split across subintervals.
template <class F, class T>
quad_result<T> adaptive_simpson(F& f, double a, double b, T fa, T fm, T fb, double tol,
                                int depth, std::size_t& evals) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const T flm = f(lm);
    const T frm = f(rm);
    evals += 2;
    const double h = b - a;
    const T whole = (h / 6.0) * (fa + 4.0 * fm + fb);
    const T left = (h / 12.0) * (fa + 4.0 * flm + fm);
    const T right = (h / 12.0) * (fm + 4.0 * frm + fb);
    const T delta = left + right - whole;
    if (depth <= 0 || quad_abs(delta) <= 15.0 * tol) {
        quad_result<T> r;
        r.value = left + right + delta / 15.0;
        r.error_estimate = quad_abs(delta) / 15.0;
        r.converged = depth > 0 || quad_abs(delta) <= 15.0 * tol;
        return r;
    }
    auto rl = adaptive_simpson(f, a, m, fa, flm, fm, tol / 2, depth - 1, evals);
    auto rr = adaptive_simpson(f, m, b, fm, frm, fb, tol / 2, depth - 1, evals);
    quad_result<T> r;
    r.value = rl.value + rr.value;
    r.error_estimate = rl.error_estimate + rr.error_estimate;
    r.converged = rl.converged && rr.converged;
    return r;
}

}  // namespace detail

// Oriented integral of f over [a,b] (a > b allowed) to absolute tolerance.
// The range is pre-split into uniform panels so short oscillations cannot
// alias past the first Simpson probe.
template <class T = double, class F>
quad_result<T> integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                         int max_depth = 48, int initial_panels = 8) {
    quad_result<T> r;
    if (a == b) return r;
    double lo = a, hi = b;
    double orientation = 1.0;
    if (lo > hi) {
        std::swap(lo, hi);
        orientation = -1.0;
    }
    std::size_t evals = 0;
    const double h = (hi - lo) / initial_panels;
    T total{};
    double err = 0.0;
    bool converged = true;
    for (int p = 0; p < initial_panels; ++p) {
        const double pa = lo + p * h;
        const double pb = p + 1 == initial_panels ? hi : pa + h;
        const T fa = f(pa);
        const T fm = f(0.5 * (pa + pb));
        const T fb = f(pb);
        evals += 3;
        auto rp = detail::adaptive_simpson(f, pa, pb, fa, fm, fb, abs_tol / initial_panels,
                                           max_depth, evals);
        total = total + rp.value;
        err += rp.error_estimate;
        converged = converged && rp.converged;
    }
    r.value = orientation * total;
    r.error_estimate = err;
    r.converged = converged;
    r.evaluations = evals;
    return r;
}

template <class T = double, class F>
T integrate_or_throw(F&& f, double a, double b, double abs_tol = 1e-10, int max_depth = 48,
                     int initial_panels = 8) {
    auto r = integrate<T>(std::forward<F>(f), a, b, abs_tol, max_depth, initial_panels);
    if (!r.converged) throw numeric_error("quadrature did not converge", r.error_estimate);
    return r.value;
}

// Integral of an oscillatory integrand over [a,b], split at multiples of
// chunk (typically a half-period of the dominant phase). Chunk sums are
// compensated; each chunk is integrated adaptively with a per-chunk budget.
template <class T = double, class F>
quad_result<T> integrate_oscillatory(F&& f, double a, double b, double chunk,
                                     double abs_tol = 1e-10) {
    quad_result<T> out;
    if (a == b) return out;
    if (chunk <= 0 || (b - a) / chunk < 4) return integrate<T>(std::forward<F>(f), a, b, abs_tol);
    const std::size_t n_chunks = std::size_t((b - a) / chunk) + 1;
    const double per_chunk_tol = abs_tol / double(n_chunks);
    kahan_sum re, im;
    double x = a;
    std::size_t evals = 0;
    bool converged = true;
    double err = 0.0;
    while (x < b) {
        const double x2 = std::min(x + chunk, b);
        auto r = integrate<T>(f, x, x2, per_chunk_tol, 24, 2);
        if constexpr (std::is_same_v<T, cdouble>) {
            re.add(r.value.real());
            im.add(r.value.imag());
        } else {
            re.add(r.value);
        }
        err += r.error_estimate;
        evals += r.evaluations;
        converged = converged && r.converged;
        x = x2;
    }
    if constexpr (std::is_same_v<T, cdouble>)
        out.value = cdouble(re.value(), im.value());
    else
        out.value = T(re.value());
    out.error_estimate = err;
    out.converged = converged;
    out.evaluations = evals;
    return out;
}

// Golden-section minimum of a unimodal function on [lo, hi].
template <class F>
std::pair<double, double> golden_section_min(F&& f, double lo, double hi, double rel_tol = 1e-6,
                                             int max_iter = 200) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace steincf
