#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace steincf {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

inline double sqr(double x) { return x * x; }

inline int sign(double x) { return (x > 0) - (x < 0); }

// Neumaier-compensated accumulator.
class kahan_sum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    kahan_sum& operator+=(double x) { add(x); return *this; }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class kahan_csum {
public:
    void add(cdouble z) { re_.add(z.real()); im_.add(z.imag()); }
    cdouble value() const { return {re_.value(), im_.value()}; }

private:
    kahan_sum re_, im_;
};

// Streaming raw-moment accumulator (compensated), up to 4th power.
// Mergeable so Monte Carlo partitions can be combined in fixed order.
class moment_accumulator {
public:
    void add(double x) {
        const double x2 = x * x;
        s1_.add(x);
        s2_.add(x2);
        s3_.add(x2 * x);
        s4_.add(x2 * x2);
        ++n_;
    }
    void merge(const moment_accumulator& other) {
        s1_.add(other.s1_.value());
        s2_.add(other.s2_.value());
        s3_.add(other.s3_.value());
        s4_.add(other.s4_.value());
        n_ += other.n_;
    }
    std::size_t count() const { return n_; }
    double mean() const { return s1_.value() / double(n_); }
    double raw_moment(int p) const {
        switch (p) {
            case 1: return s1_.value() / double(n_);
            case 2: return s2_.value() / double(n_);
            case 3: return s3_.value() / double(n_);
            default: return s4_.value() / double(n_);
        }
    }
    // Unbiased sample variance.
    double variance() const {
        const double m = mean();
        return (s2_.value() - double(n_) * m * m) / double(n_ - 1);
    }
    // Standard error of the sample variance, sqrt((m4 - var^2)/n) with central m4.
    double variance_stderr() const {
        const double m = mean();
        const double v = raw_moment(2) - m * m;
        const double c4 = raw_moment(4) - 4 * m * raw_moment(3) + 6 * m * m * raw_moment(2) -
                          3 * m * m * m * m;
        const double var_of_var = (c4 - v * v) / double(n_);
        return var_of_var > 0 ? std::sqrt(var_of_var) : 0.0;
    }

private:
    kahan_sum s1_, s2_, s3_, s4_;
    std::size_t n_ = 0;
};

inline std::vector<double> linspace(double a, double b, std::size_t count) {
    std::vector<double> out(count);
    if (count == 1) { out[0] = a; return out; }
    const double h = (b - a) / double(count - 1);
    for (std::size_t i = 0; i < count; ++i) out[i] = a + h * double(i);
    out.back() = b;
    return out;
}

inline std::vector<double> logspace(double a, double b, std::size_t count) {
    auto xs = linspace(std::log(a), std::log(b), count);
    for (double& x : xs) x = std::exp(x);
    return xs;
}

// Central finite difference with one Richardson step; h chosen for ~1e-10
// absolute accuracy on O(1) analytic functions.
template <class F>
cdouble differentiate(F&& f, double t, double h = 1e-4) {
    const cdouble d1 = (f(t + h) - f(t - h)) / (2.0 * h);
    const cdouble d2 = (f(t + h / 2) - f(t - h / 2)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace steincf
