#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <ostream>
#include <vector>

#include "steincf/char_fn.hpp"
#include "steincf/errors.hpp"
#include "steincf/numeric.hpp"

namespace steincf {

// Exact finite pmf on the uniform grid {origin + k*step : k = 0..K}.
struct LatticeDistribution {
    double step = 1.0;
    double origin = 0.0;
    std::vector<double> pmf;

    double value_at(std::size_t k) const { return origin + step * double(k); }

    double total_mass() const {
        kahan_sum s;
        for (double p : pmf) s.add(p);
        return s.value();
    }

    double mean() const {
        kahan_sum s;
        for (std::size_t k = 0; k < pmf.size(); ++k) s.add(pmf[k] * value_at(k));
        return s.value();
    }

    // P(X <= x) exactly from the atom masses.
    double cdf(double x) const {
        kahan_sum s;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            if (value_at(k) > x) break;
            s.add(pmf[k]);
        }
        return s.value();
    }

    std::vector<double> cumulative() const {
        std::vector<double> out(pmf.size());
        kahan_sum s;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            s.add(pmf[k]);
            out[k] = s.value();
        }
        return out;
    }
};

// Convolution DP over independent integer-valued components with
// nonnegative integer weights: law of sum_j weight_j * X_j on the integer
// grid, later rescaled. Entries below 1e-300 are flushed, the trailing zero
// block is trimmed, and the final pmf is renormalized.
class lattice_builder {
public:
    lattice_builder() : pmf_{1.0} {}

    // Adds weight * X, X ~ Bernoulli(p); in place, scanning downward.
    void add_bernoulli(std::size_t weight, double p) {
        const std::size_t old_size = pmf_.size();
        pmf_.resize(old_size + weight, 0.0);
        const double q = 1.0 - p;
        for (std::size_t k = pmf_.size(); k-- > 0;) {
            const double stay = k < old_size ? pmf_[k] * q : 0.0;
            const double jump = k >= weight ? pmf_[k - weight] * p : 0.0;
            const double v = stay + jump;
            pmf_[k] = v < 1e-300 ? 0.0 : v;
        }
        trim();
    }

    // Adds weight * X where X has pmf `component` on {0,1,...}.
    void add_component(std::size_t weight, const std::vector<double>& component) {
        if (component.size() == 2) {
            add_bernoulli(weight, component[1] / (component[0] + component[1]));
            return;
        }
        if (component.size() == 1) return;  // X == 0 surely
        scratch_.assign(pmf_.size() + weight * (component.size() - 1), 0.0);
        for (std::size_t k = 0; k < pmf_.size(); ++k) {
            const double p = pmf_[k];
            if (p == 0.0) continue;
            for (std::size_t v = 0; v < component.size(); ++v) {
                if (component[v] == 0.0) continue;
                scratch_[k + weight * v] += p * component[v];
            }
        }
        for (double& p : scratch_)
            if (p < 1e-300) p = 0.0;
        pmf_.swap(scratch_);
        trim();
    }

    LatticeDistribution finish(double step, double origin = 0.0) {
        LatticeDistribution out;
        out.step = step;
        out.origin = origin;
        out.pmf = std::move(pmf_);
        double total = 0.0;
        {
            kahan_sum s;
            for (double p : out.pmf) s.add(p);
            total = s.value();
        }
        for (double& p : out.pmf) p /= total;
        pmf_ = {1.0};
        scratch_.clear();
        return out;
    }

private:
    void trim() {
        std::size_t last = pmf_.size();
        while (last > 1 && pmf_[last - 1] == 0.0) --last;
        pmf_.resize(last);
    }

    std::vector<double> pmf_;
    std::vector<double> scratch_;
};

// CF of a lattice law: sum p_k e^{i t x_k}, with analytic derivative.
inline CharFn lattice_cf(LatticeDistribution dist) {
    auto d = std::make_shared<const LatticeDistribution>(std::move(dist));
    CharFn out;
    out.provenance = CharFn::Provenance::Lattice;
    out.eval = [d](double t) {
        kahan_sum re, im;
        for (std::size_t k = 0; k < d->pmf.size(); ++k) {
            const double p = d->pmf[k];
            if (p == 0.0) continue;
            const double x = d->value_at(k);
            re.add(p * std::cos(t * x));
            im.add(p * std::sin(t * x));
        }
        return cdouble(re.value(), im.value());
    };
    out.deriv = [d](double t) {
        kahan_sum re, im;
        for (std::size_t k = 0; k < d->pmf.size(); ++k) {
            const double p = d->pmf[k];
            if (p == 0.0) continue;
            const double x = d->value_at(k);
            re.add(-p * x * std::sin(t * x));
            im.add(p * x * std::cos(t * x));
        }
        return cdouble(re.value(), im.value());
    };
    return out;
}

// CSV with header "value,probability"; zero atoms are kept so the grid stays
// uniform.
inline void write_lattice_csv(std::ostream& os, const LatticeDistribution& d) {
    os << "value,probability\n";
    char buf[64];
    for (std::size_t k = 0; k < d.pmf.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", d.value_at(k), d.pmf[k]);
        os << buf;
    }
}

}  // namespace steincf
