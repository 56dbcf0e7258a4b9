#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/rng.hpp"
#include "steincf/targets.hpp"

using namespace steincf;
using Catch::Matchers::WithinAbs;

namespace {

// Independent oracle for the Dickman inner integral: straight adaptive
// quadrature of int_0^1 (e^{itx}-1)/x dx, never touching the series path.
cdouble dickman_integral_oracle(double t, double tol = 1e-12) {
    auto f = [t](double x) -> cdouble {
        if (x == 0.0) return cdouble(0.0, t);
        return (std::exp(cdouble(0.0, t * x)) - 1.0) / x;
    };
    return integrate_oscillatory<cdouble>(f, 0.0, 1.0, kPi / std::max(1.0, std::abs(t)), tol)
        .value;
}

}  // namespace

TEST_CASE("dickman inner integral: trivial values") {
    CHECK(dickman_inner_integral(1.0, 0.0) == cdouble(0.0, 0.0));
    // linearity in theta
    const cdouble one = dickman_inner_integral(1.0, 1.0);
    const cdouble two = dickman_inner_integral(2.0, 1.0);
    CHECK_THAT(std::abs(two - 2.0 * one), WithinAbs(0.0, 1e-15));
}

TEST_CASE("dickman inner integral at t=1 matches the k<=8 series value") {
    // frozen from sum_{k=1..8} i^k/(k k!), cross-checked against quadrature
    const cdouble v = dickman_inner_integral(1.0, 1.0);
    CHECK_THAT(v.real(), WithinAbs(-0.2398117420, 1e-9));
    CHECK_THAT(v.imag(), WithinAbs(0.9460830704, 1e-9));
    const cdouble q = dickman_integral_oracle(1.0);
    CHECK_THAT(std::abs(v - q), WithinAbs(0.0, 1e-11));
}

TEST_CASE("dickman inner integral: series and quadrature branches agree on [10,30]") {
    for (double t : {10.0, 14.5, 20.0, 25.0, 29.5, 30.0}) {
        const cdouble series = dickman_inner_integral(1.0, t);  // series branch
        const cdouble oracle = dickman_integral_oracle(t);
        CHECK_THAT(std::abs(series - oracle), WithinAbs(0.0, 1e-10));
        // conjugate symmetry across both branches
        CHECK_THAT(std::abs(dickman_inner_integral(1.0, -t) - std::conj(series)),
                   WithinAbs(0.0, 1e-14));
    }
}

TEST_CASE("dickman fast phase agrees with the op across the 30 switch") {
    const CharFn cf = target_cf(DickmanTarget{1.0});
    for (double t : {0.5, 5.0, 29.0, 31.0, 45.0, 80.0, 250.0}) {
        const cdouble direct = std::exp(dickman_inner_integral(1.0, t));
        CHECK_THAT(std::abs(cf.eval(t) - direct), WithinAbs(0.0, 1e-10));
    }
}

TEST_CASE("target CFs at zero and simple points") {
    CHECK(target_cf(GaussianTarget{}).eval(0.0) == cdouble(1.0, 0.0));
    CHECK(target_cf(GammaTarget{2.0, 3.0}).eval(0.0) == cdouble(1.0, 0.0));
    CHECK(target_cf(DickmanTarget{1.0}).eval(0.0) == cdouble(1.0, 0.0));
    CHECK(target_cf(StableTarget{1.5}).eval(0.0) == cdouble(1.0, 0.0));

    CHECK_THAT(target_cf(GaussianTarget{}).eval(1.0).real(),
               WithinAbs(std::exp(-0.5), 1e-15));

    // second chaos d=1, lambda=1, m=1 at t=1: e^{-i}/(1-2i)^{1/2}
    SecondChaosTarget sc{ChaosParams{{1.0}, {1}}};
    const cdouble expected = std::exp(cdouble(0.0, -1.0)) /
                             std::sqrt(cdouble(1.0, -2.0));
    CHECK_THAT(std::abs(target_cf(sc).eval(1.0) - expected), WithinAbs(0.0, 1e-14));
}

TEST_CASE("dickman CF at t=1 matches frozen value") {
    const cdouble v = target_cf(DickmanTarget{1.0}).eval(1.0);
    CHECK_THAT(v.real(), WithinAbs(0.460, 5e-4));
    CHECK_THAT(v.imag(), WithinAbs(0.638, 5e-4));
}

TEST_CASE("hermitian symmetry holds for every exact CF") {
    std::vector<TargetSpec> specs = {
        GaussianTarget{}, GammaTarget{1.0, 1.0}, DickmanTarget{1.0},
        SecondChaosTarget{ChaosParams{{1.0, -2.0}, {1, 2}}}, StableTarget{1.5}};
    rng_stream rng(20240817);
    for (const auto& spec : specs) {
        const CharFn cf = target_cf(spec);
        for (int i = 0; i < 200; ++i) {
            const double t = 100.0 * rng.uniform01() - 50.0;
            const cdouble a = cf.eval(-t);
            const cdouble b = std::conj(cf.eval(t));
            REQUIRE_THAT(std::abs(a - b), WithinAbs(0.0, 1e-12));
        }
    }
}

TEST_CASE("analytic derivatives agree with finite differences") {
    std::vector<TargetSpec> specs = {
        GaussianTarget{}, GammaTarget{2.0, 1.5}, DickmanTarget{1.0},
        SecondChaosTarget{ChaosParams{{0.7, -1.3}, {2, 1}}}, StableTarget{1.4}};
    for (const auto& spec : specs) {
        const CharFn cf = target_cf(spec);
        for (double t : {-3.0, -0.7, 0.4, 1.9, 6.0}) {
            const cdouble numeric = differentiate([&](double u) { return cf.eval(u); }, t);
            REQUIRE_THAT(std::abs(cf.deriv(t) - numeric), WithinAbs(0.0, 1e-8));
        }
    }
}

TEST_CASE("dickman size-bias identity in Fourier form") {
    // phi'(t) = i theta phi(t) (e^{it}-1)/(it), t=0 handled analytically
    for (double theta : {1.0, 2.5}) {
        const CharFn cf = target_cf(DickmanTarget{theta});
        for (double t = -20.0; t <= 20.0; t += 0.5) {
            const cdouble lhs = t == 0.0
                                    ? differentiate([&](double u) { return cf.eval(u); }, 0.0)
                                    : differentiate([&](double u) { return cf.eval(u); }, t);
            const cdouble rhs = t == 0.0
                                    ? cdouble(0.0, theta)
                                    : cf.eval(t) * theta * (std::exp(cdouble(0.0, t)) - 1.0) / t;
            REQUIRE_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-8));
        }
    }
}

TEST_CASE("second chaos envelopes sandwich |phi|") {
    rng_stream rng(99);
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 1 + int(rng.uniform01() * 3);
        ChaosParams p;
        for (int k = 0; k < d; ++k) {
            double l;
            do {
                l = 4.0 * rng.uniform01() - 2.0;
            } while (std::abs(l) < 0.1);
            p.lambda.push_back(l + k * 1e-3);  // keep entries distinct
            p.multiplicity.push_back(1 + int(rng.uniform01() * 3));
        }
        const double q = p.q();
        const double lmin = p.lambda_abs_min(), lmax = p.lambda_abs_max();
        const CharFn cf = target_cf(SecondChaosTarget{p});
        for (int i = 0; i < 100; ++i) {
            const double xi = 60.0 * rng.uniform01() - 30.0;
            const double mod = std::abs(cf.eval(xi));
            const double lower = std::pow(1.0 + 4.0 * lmax * lmax * xi * xi, -q / 4.0);
            const double upper = std::pow(1.0 + 4.0 * lmin * lmin * xi * xi, -q / 4.0);
            REQUIRE(mod >= lower - 1e-10);
            REQUIRE(mod <= upper + 1e-10);
        }
    }
}

TEST_CASE("parameter validation rejects bad targets") {
    CHECK_THROWS_AS(validate(TargetSpec{GammaTarget{-1.0, 1.0}}), domain_error);
    CHECK_THROWS_AS(validate(TargetSpec{DickmanTarget{0.0}}), domain_error);
    CHECK_THROWS_AS(validate(TargetSpec{StableTarget{1.0}}), domain_error);
    CHECK_THROWS_AS(validate(TargetSpec{StableTarget{2.0}}), domain_error);
    CHECK_THROWS_AS(validate(TargetSpec{SecondChaosTarget{ChaosParams{{1.0, 1.0}, {1, 1}}}}),
                    domain_error);
    CHECK_THROWS_AS(validate(TargetSpec{SecondChaosTarget{ChaosParams{{0.0}, {1}}}}),
                    domain_error);
    CHECK_THROWS_AS(dickman_inner_integral(-1.0, 1.0), domain_error);
}
