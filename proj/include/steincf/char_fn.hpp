#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"

namespace steincf {

// An evaluatable characteristic function t -> E[e^{itX}], optionally carrying
// an evaluatable derivative t -> E[iX e^{itX}]. Evaluators are immutable and
// safe to share across threads.
struct CharFn {
    enum class Provenance { Exact, Empirical, Lattice };

    std::function<cdouble(double)> eval;
    std::function<cdouble(double)> deriv;  // empty when unavailable
    Provenance provenance = Provenance::Exact;
    std::size_t sample_size = 0;  // Empirical only
    std::uint64_t seed = 0;       // Empirical only

    bool has_deriv() const { return static_cast<bool>(deriv); }

    cdouble operator()(double t) const { return eval(t); }

    cdouble deriv_at(double t) const {
        if (!deriv) throw capability_error("CharFn: derivative not available");
        return deriv(t);
    }
};

// Product rule over independent components: phi(t) = prod phi_j(w_j t).
// The derivative uses prefix/suffix products, so no division by phi_j.
inline CharFn weighted_sum_cf(std::vector<std::pair<double, CharFn>> components) {
    auto comps = std::make_shared<const std::vector<std::pair<double, CharFn>>>(
        std::move(components));

    CharFn out;
    out.provenance = CharFn::Provenance::Exact;
    out.eval = [comps](double t) {
        cdouble prod{1.0, 0.0};
        for (const auto& [w, cf] : *comps) prod *= cf.eval(w * t);
        return prod;
    };

    bool all_deriv = true;
    for (const auto& [w, cf] : *comps) all_deriv = all_deriv && cf.has_deriv();
    if (all_deriv) {
        out.deriv = [comps](double t) {
            const std::size_t m = comps->size();
            if (m == 0) return cdouble{0.0, 0.0};
            std::vector<cdouble> vals(m);
            for (std::size_t j = 0; j < m; ++j)
                vals[j] = (*comps)[j].second.eval((*comps)[j].first * t);
            std::vector<cdouble> suffix(m + 1);
            suffix[m] = {1.0, 0.0};
            for (std::size_t j = m; j-- > 0;) suffix[j] = suffix[j + 1] * vals[j];
            cdouble prefix{1.0, 0.0};
            kahan_csum sum;
            for (std::size_t j = 0; j < m; ++j) {
                const auto& [w, cf] = (*comps)[j];
                sum.add(w * cf.deriv(w * t) * prefix * suffix[j + 1]);
                prefix *= vals[j];
            }
            return sum.value();
        };
    }
    return out;
}

// Empirical CF at a single point: mean of e^{itX} with a componentwise
// standard error combined as root-sum-square.
inline std::pair<cdouble, double> empirical_cf(const std::vector<double>& sample, double t) {
    require_domain(!sample.empty(), "empirical_cf: sample must be nonempty");
    kahan_sum sc, ss, sc2, ss2;
    for (double x : sample) {
        const double c = std::cos(t * x);
        const double s = std::sin(t * x);
        sc.add(c);
        ss.add(s);
        sc2.add(c * c);
        ss2.add(s * s);
    }
    const double n = double(sample.size());
    const double mc = sc.value() / n;
    const double ms = ss.value() / n;
    double stderr_sq = 0.0;
    if (sample.size() > 1) {
        const double var_c = (sc2.value() - n * mc * mc) / (n - 1);
        const double var_s = (ss2.value() - n * ms * ms) / (n - 1);
        stderr_sq = (std::max(var_c, 0.0) + std::max(var_s, 0.0)) / n;
    }
    return {cdouble(mc, ms), std::sqrt(stderr_sq)};
}

// Empirical CF as a CharFn over a shared sample, with the analytic empirical
// derivative mean(iX e^{itX}).
inline CharFn make_empirical_cf(std::shared_ptr<const std::vector<double>> sample,
                                std::uint64_t seed = 0) {
    require_domain(sample && !sample->empty(), "make_empirical_cf: sample must be nonempty");
    CharFn out;
    out.provenance = CharFn::Provenance::Empirical;
    out.sample_size = sample->size();
    out.seed = seed;
    out.eval = [sample](double t) {
        kahan_sum sc, ss;
        for (double x : *sample) {
            sc.add(std::cos(t * x));
            ss.add(std::sin(t * x));
        }
        const double n = double(sample->size());
        return cdouble(sc.value() / n, ss.value() / n);
    };
    out.deriv = [sample](double t) {
        kahan_sum sc, ss;
        for (double x : *sample) {
            sc.add(-x * std::sin(t * x));
            ss.add(x * std::cos(t * x));
        }
        const double n = double(sample->size());
        return cdouble(sc.value() / n, ss.value() / n);
    };
    return out;
}

// Standard error of the empirical derivative mean(iX e^{itX}).
inline double empirical_cf_deriv_stderr(const std::vector<double>& sample, double t) {
    require_domain(!sample.empty(), "empirical_cf_deriv_stderr: sample must be nonempty");
    kahan_sum sc, ss, sc2, ss2;
    for (double x : sample) {
        const double c = -x * std::sin(t * x);
        const double s = x * std::cos(t * x);
        sc.add(c);
        ss.add(s);
        sc2.add(c * c);
        ss2.add(s * s);
    }
    const double n = double(sample.size());
    if (sample.size() < 2) return 0.0;
    const double mc = sc.value() / n;
    const double ms = ss.value() / n;
    const double var_c = (sc2.value() - n * mc * mc) / (n - 1);
    const double var_s = (ss2.value() - n * ms * ms) / (n - 1);
    return std::sqrt((std::max(var_c, 0.0) + std::max(var_s, 0.0)) / n);
}

}  // namespace steincf
