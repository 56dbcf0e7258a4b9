#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "steincf/char_fn.hpp"
#include "steincf/lattice.hpp"
#include "steincf/logcomb.hpp"
#include "steincf/numeric.hpp"
#include "steincf/quadrature.hpp"
#include "steincf/rng.hpp"
#include "steincf/targets.hpp"

using namespace steincf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent oracle for the coupling gap: 2-D quadrature of
// E |U - increment(U)| over u, averaging over the component law at each
// interval. Never uses the closed-form piecewise integrals.
double coupling_gap_quadrature(const LogCombStructure& s) {
    const auto coupling = build_coupling(s);
    kahan_sum total;
    for (std::size_t j = 1; j < coupling.thresholds.size(); ++j) {
        const double a = coupling.thresholds[j - 1];
        const double b = coupling.thresholds[j];
        if (b <= a) continue;
        double p1 = 0.0, w = 0.0;
        if (s.kind == LogCombKind::Records) {
            p1 = 1.0 / double(j);
            w = double(j) / double(s.n);
        } else if (s.kind == LogCombKind::PoissonTheta) {
            p1 = 0.0;  // increment is I/n surely
            w = double(j) / double(s.n);
        }
        auto integrand = [&](double u) {
            if (s.kind == LogCombKind::PoissonTheta) return std::abs(u - w);
            return (1.0 - p1) * std::abs(u - w) + p1 * std::abs(u);
        };
        total.add(integrate_or_throw<double>(integrand, a, b, 1e-13));
    }
    return total.value();
}

}  // namespace

TEST_CASE("coupling: records and poisson index laws are uniform") {
    const auto rec = build_coupling({LogCombKind::Records, 1.0, 4});
    REQUIRE(rec.index_law.size() == 4);
    for (double p : rec.index_law) CHECK_THAT(p, WithinAbs(0.25, 1e-15));
    CHECK(rec.thresholds.front() == 0.0);
    CHECK(rec.thresholds.back() == 1.0);

    const auto poi = build_coupling({LogCombKind::PoissonTheta, 2.0, 3});
    for (double p : poi.index_law) CHECK_THAT(p, WithinAbs(1.0 / 3.0, 1e-15));
}

TEST_CASE("coupling: primes n=3 thresholds from the log p_k/(p_k+1) sums") {
    const auto c = build_coupling({LogCombKind::Primes, 1.0, 3});
    const double log5 = std::log(5.0);
    const double z3 = (std::log(2.0) / 3.0 + std::log(3.0) / 4.0 + log5 / 6.0) / log5;
    CHECK_THAT(z3, WithinAbs(0.4809, 1e-4));
    CHECK_THAT(primes_mean(3), WithinAbs(z3, 1e-14));
    CHECK_THAT(c.thresholds[1], WithinAbs(std::log(2.0) / 3.0 / log5 / z3, 1e-13));
    CHECK_THAT(c.thresholds[3], WithinAbs(1.0, 1e-14));
    kahan_sum s;
    for (double p : c.index_law) s.add(p);
    CHECK_THAT(s.value(), WithinAbs(1.0, 1e-12));
}

TEST_CASE("delta_n: records mean gap vanishes, coupling gap matches quadrature") {
    for (long long n : {2, 5, 17, 40}) {
        const auto d = delta_n({LogCombKind::Records, 1.0, n});
        CHECK(d.mean_gap == 0.0);
        CHECK_THAT(d.coupling_gap, WithinAbs(coupling_gap_quadrature({LogCombKind::Records, 1.0, n}),
                                             1e-11));
        CHECK_THAT(d.total, WithinAbs(d.mean_gap + d.coupling_gap, 1e-15));
    }
}

TEST_CASE("delta_n: poisson coupling gap is exactly 1/(2n)") {
    for (long long n : {1, 3, 10, 100}) {
        const auto d = delta_n({LogCombKind::PoissonTheta, 0.7, n});
        CHECK(d.mean_gap == 0.0);
        CHECK_THAT(d.coupling_gap, WithinAbs(0.5 / double(n), 1e-15));
    }
}

TEST_CASE("delta_n: n * total stays bounded for records") {
    double worst = 0.0;
    for (long long n : {50, 100, 200, 400, 800, 1600, 3200}) {
        const auto d = delta_n({LogCombKind::Records, 1.0, n});
        worst = std::max(worst, double(n) * d.total);
    }
    CHECK(worst < 2.0);  // exact value tends to 3/2
    CHECK(worst >= 1.0);
}

TEST_CASE("prime delta: n=3 mean gap and decreasing totals") {
    const auto [d3, proxy3] = prime_delta_n(3);
    CHECK_THAT(d3.mean_gap, WithinAbs(0.519, 5e-4));

    const auto [d100, p100] = prime_delta_n(100);
    const auto [d1000, p1000] = prime_delta_n(1000);
    const auto [d10000, p10000] = prime_delta_n(10000);
    CHECK(d100.total > d1000.total);
    CHECK(d1000.total > d10000.total);

    // ratio to the loglog n / log n proxy stays within a factor 10 band
    const double r1 = d100.total / p100;
    const double r2 = d1000.total / p1000;
    const double r3 = d10000.total / p10000;
    const double rmax = std::max({r1, r2, r3});
    const double rmin = std::min({r1, r2, r3});
    CHECK(rmax / rmin <= 10.0);
    CHECK_THROWS_AS(prime_delta_n(2), domain_error);
}

TEST_CASE("cf_diff_bound: zero at zero, plug forms") {
    const LogCombStructure rec{LogCombKind::Records, 1.0, 100};
    CHECK(cf_diff_bound(rec, 0.0) == 0.0);
    const auto d = delta_n(rec);
    CHECK_THAT(cf_diff_bound(rec, 1.0), WithinAbs(d.coupling_gap, 1e-15));
    CHECK_THAT(cf_diff_bound(rec, -2.0),
               WithinAbs(2.0 * d.mean_gap + 4.0 * d.coupling_gap, 1e-15));
}

TEST_CASE("cf_diff_bound dominates the exact CF difference (records vs dickman)") {
    const CharFn dickman = target_cf(DickmanTarget{1.0});
    rng_stream rng(808);
    for (long long n : {50, 100, 200}) {
        const LogCombStructure s{LogCombKind::Records, 1.0, n};
        const auto d = delta_n(s);
        const CharFn tn = lattice_cf(lattice_distribution(s));
        for (int i = 0; i < 100; ++i) {
            const double t = 40.0 * rng.uniform01() - 20.0;
            const double exact = std::abs(tn.eval(t) - dickman.eval(t));
            REQUIRE(exact <= cf_diff_bound(d, t) + 1e-12);
        }
    }
}

TEST_CASE("size-bias identity for records holds exactly on the lattice") {
    // E[T e^{itT}] = E[T] E[e^{it(T + I(1-X_I)/n)}]; the right side reduces to
    // (1/n) sum_j e^{itj/n} prod_{k != j} phi_k(t).
    for (long long n : {5, 17, 30}) {
        const auto lat = lattice_distribution({LogCombKind::Records, 1.0, n});
        const CharFn cf = lattice_cf(lat);
        for (double t : {-8.0, -1.1, 0.4, 2.0, 9.0}) {
            const cdouble lhs = cdouble(0.0, -1.0) * cf.deriv(t);  // E[T e^{itT}]

            std::vector<cdouble> comp(static_cast<std::size_t>(n));
            for (long long j = 1; j <= n; ++j) {
                const double p = 1.0 / double(j);
                comp[std::size_t(j - 1)] =
                    cdouble(1.0 - p, 0.0) + p * std::exp(cdouble(0.0, t * double(j) / double(n)));
            }
            std::vector<cdouble> suffix(std::size_t(n) + 1, cdouble(1.0, 0.0));
            for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] * comp[j];
            cdouble prefix(1.0, 0.0);
            kahan_csum rhs_sum;
            for (long long j = 1; j <= n; ++j) {
                rhs_sum.add(std::exp(cdouble(0.0, t * double(j) / double(n))) * prefix *
                            suffix[std::size_t(j)]);
                prefix *= comp[std::size_t(j - 1)];
            }
            const cdouble rhs = rhs_sum.value() / double(n);  // E[T] = 1
            REQUIRE_THAT(std::abs(lhs - rhs), WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("dickman sampler: determinism, mean, CF consistency") {
    const auto a = sample_dickman(1.0, 2000, 99);
    const auto b = sample_dickman(1.0, 2000, 99);
    REQUIRE(a == b);

    const auto big = sample_dickman(1.0, 1'000'000, 31337);
    moment_accumulator acc;
    for (double x : big) acc.add(x);
    const double se_mean = std::sqrt(acc.variance() / double(big.size()));
    CHECK(std::abs(acc.mean() - 1.0) <= 4.0 * se_mean);

    const CharFn cf = target_cf(DickmanTarget{1.0});
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
        auto [value, se] = empirical_cf(big, t);
        REQUIRE(std::abs(value - cf.eval(t)) <= 4.0 * se);
    }
    // cross-module frozen value at t=1
    auto [v1, se1] = empirical_cf(big, 1.0);
    CHECK(std::abs(v1 - cdouble(0.460, 0.638)) <= 4.0 * se1 + 1e-3);
}

TEST_CASE("mgf bounds: finite, consistent with the dickman limit") {
    const double gamma = 1.0;
    const double zmgf = dickman_mgf(1.0, gamma);
    CHECK_THAT(zmgf, WithinRel(std::exp(1.3179021514544), 1e-9));
    for (long long n : {10, 100, 1000}) {
        const double m = records_mgf(n, gamma);
        CHECK(std::isfinite(m));
        CHECK(m < std::exp(std::exp(1.0)));  // gamma e^gamma envelope at gamma=1
    }
    // poisson-structure mgf approaches the dickman mgf from below as n grows
    CHECK_THAT(poisson_structure_mgf(1.0, 4000, gamma), WithinRel(zmgf, 1e-3));
}

TEST_CASE("prime sum sampler matches the structure's mean and is deterministic") {
    const long long n = 200;
    const auto s1 = sample_primes_sum(n, 200000, 5);
    const auto s2 = sample_primes_sum(n, 200000, 5);
    REQUIRE(s1 == s2);
    moment_accumulator acc;
    for (double x : s1) acc.add(x);
    const double expected_mean = primes_mean(n);
    const double se = std::sqrt(acc.variance() / double(s1.size()));
    CHECK(std::abs(acc.mean() - expected_mean) <= 4.0 * se);
}
