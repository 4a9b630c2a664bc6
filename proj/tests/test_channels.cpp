#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gssqpe/channels.hpp"
#include "gssqpe/dicke.hpp"
#include "oracles.hpp"

using namespace gssqpe;
constexpr double pi = std::numbers::pi;

namespace {
SpinMoments to_moments(const Eigen::VectorXcd& psi, int n) {
    return spin_moments_exact({n, psi});
}
}  // namespace

TEST_CASE("von Mises sampling: gamma=0 is uniform") {
    Rng rng(1);
    double c1 = 0, m1 = 0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i) {
        const double phi = sample_dephasing_angle({0.0}, rng);
        CHECK(phi >= -pi);
        CHECK(phi < pi);
        c1 += std::cos(phi);
        m1 += phi;
    }
    CHECK(std::abs(c1 / draws) < 0.006);       // ~3.8 sigma of 1/sqrt(2 draws)
    CHECK(std::abs(m1 / draws) < 0.015);
}

TEST_CASE("von Mises sampling: empirical c1, c2 match quadrature") {
    for (double gamma : {2.0, 10.0}) {
        Rng rng{std::uint64_t(gamma)};
        const int draws = 400000;
        double c1 = 0, c2 = 0;
        for (int i = 0; i < draws; ++i) {
            const double phi = sample_dephasing_angle({gamma}, rng);
            c1 += std::cos(phi);
            c2 += std::cos(2 * phi);
        }
        c1 /= draws;
        c2 /= draws;
        const FourierCoefficients fc = fourier_coefficients({gamma});
        CHECK(c1 == doctest::Approx(fc.c1).epsilon(0.01));
        CHECK(c2 == doctest::Approx(fc.c2).epsilon(0.02));
    }
}

TEST_CASE("fourier coefficients: known values") {
    const FourierCoefficients zero = fourier_coefficients({0.0});
    CHECK(std::abs(zero.c1) < 1e-12);
    CHECK(std::abs(zero.c2) < 1e-12);

    // Bessel ratio oracle, independent of the module's quadrature
    const FourierCoefficients ten = fourier_coefficients({10.0});
    CHECK(ten.c1 == doctest::Approx(std::cyl_bessel_i(1, 10.0) / std::cyl_bessel_i(0, 10.0))
                        .epsilon(1e-9));
    CHECK(ten.c2 == doctest::Approx(std::cyl_bessel_i(2, 10.0) / std::cyl_bessel_i(0, 10.0))
                        .epsilon(1e-9));
    CHECK(ten.c1 == doctest::Approx(0.9486).epsilon(1e-3));

    const FourierCoefficients big = fourier_coefficients({200.0});
    CHECK(big.c1 > 0.99);
    CHECK(big.c1 <= 1.0);
    // very large gamma must not overflow
    CHECK(std::isfinite(fourier_coefficients({1e9}).c1));
}

TEST_CASE("dephase_moments: limits") {
    const SpinMoments m = spin_moments_analytic({400, 0.25});
    SUBCASE("gamma -> infinity is the identity") {
        const SpinMoments out = dephase_moments(m, DephasingConfig{5e4});
        CHECK(out.jx == doctest::Approx(m.jx).epsilon(1e-4));
        CHECK(out.jx2 == doctest::Approx(m.jx2).epsilon(1e-3));
        CHECK(out.jy2 == m.jy2);
    }
    SUBCASE("gamma = 0 randomizes the phase about y") {
        const SpinMoments out = dephase_moments(m, DephasingConfig{0.0});
        CHECK(std::abs(out.jx) < 1e-12);
        CHECK(out.jx2 == doctest::Approx((m.jx2 + m.jz2) / 2).epsilon(1e-12));
        CHECK(out.jz2 == doctest::Approx((m.jx2 + m.jz2) / 2).epsilon(1e-12));
    }
    SUBCASE("Casimir preserved") {
        const SpinMoments out = dephase_moments(m, DephasingConfig{3.0});
        CHECK(out.jx2 + out.jy2 + out.jz2 ==
              doctest::Approx(m.jx2 + m.jy2 + m.jz2).epsilon(1e-12));
    }
    SUBCASE("rejects non-y-symmetric input") {
        SpinMoments bad = m;
        bad.jy = 1.0;
        CHECK_THROWS_AS(dephase_moments(bad, DephasingConfig{1.0}), ConfigError);
    }
}

TEST_CASE("dephase_moments equals the stochastic-rotation ensemble average") {
    // exact states rotated by sampled angles, N small enough to afford many samples
    const int n = 120;
    const double gamma = 4.0;
    const StateVector psi = make_gss({n, 0.35});
    const SpinMoments in = spin_moments_exact(psi);
    Rng rng(99);
    const int samples = 20000;
    double jx = 0, jx2 = 0, jz2 = 0, jy2 = 0;
    double jx_sq = 0;  // accumulate squares for the standard error of <jx>
    for (int i = 0; i < samples; ++i) {
        const double phi = sample_dephasing_angle({gamma}, rng);
        const SpinMoments m = spin_moments_exact(apply_rotation_y(psi, phi));
        jx += m.jx;
        jx_sq += m.jx * m.jx;
        jx2 += m.jx2;
        jz2 += m.jz2;
        jy2 += m.jy2;
    }
    jx /= samples;
    jx2 /= samples;
    jz2 /= samples;
    jy2 /= samples;
    const double se_jx = std::sqrt((jx_sq / samples - jx * jx) / samples);
    const SpinMoments pred = dephase_moments(in, DephasingConfig{gamma});
    CHECK(std::abs(jx - pred.jx) < 3 * se_jx + 1e-9);
    CHECK(jx2 == doctest::Approx(pred.jx2).epsilon(0.02));
    CHECK(jz2 == doctest::Approx(pred.jz2).epsilon(0.02));
    CHECK(jy2 == doctest::Approx(pred.jy2).epsilon(1e-10));  // untouched by y rotations
}

TEST_CASE("depolarize_moments: limits and the squeezing floor") {
    const int n = 200;
    const SpinMoments m = spin_moments_analytic({n, 0.2});
    SUBCASE("eps = 0 is the identity") {
        const SpinMoments out = depolarize_moments(m, {0.0}, n);
        CHECK(out.jx == m.jx);
        CHECK(out.jy2 == m.jy2);
    }
    SUBCASE("eps = 1 is the fully mixed state") {
        const SpinMoments out = depolarize_moments(m, {1.0}, n);
        CHECK(out.jx == 0.0);
        const double mixed = n * (n + 2.0) / 12.0;
        CHECK(out.jx2 == doctest::Approx(mixed));
        CHECK(out.jy2 == doctest::Approx(mixed));
        CHECK(out.jz2 == doctest::Approx(mixed));
    }
    SUBCASE("effective squeezing follows (1-eps)s^2 + eps(N+2)/3") {
        const double eps = 1e-3;
        const SpinMoments out = depolarize_moments(m, {eps}, n);
        const double s_eff2 = 4.0 * out.jy2 / n;
        CHECK(s_eff2 == doctest::Approx((1 - eps) * 0.04 + eps * (n + 2.0) / 3.0).epsilon(1e-12));
        CHECK(s_eff2 * 3.0 / n >= eps * (1 - 1e-9));  // floor s^2_min = eps N / 3 (asymptotic)
    }
    SUBCASE("linear in eps") {
        const SpinMoments a = depolarize_moments(m, {0.2}, n);
        const SpinMoments b = depolarize_moments(m, {0.4}, n);
        const SpinMoments c = depolarize_moments(m, {0.3}, n);
        CHECK(c.jx2 == doctest::Approx((a.jx2 + b.jx2) / 2).epsilon(1e-12));
    }
}

TEST_CASE("sample_depolarized_outcome: mixing behavior") {
    SUBCASE("eps = 1 gives uniform outcomes (chi^2 at the 1% level)") {
        Eigen::VectorXd point = Eigen::VectorXd::Zero(3);
        point[1] = 1.0;  // N = 2, point mass at mu = 0
        Rng rng(5);
        const int draws = 100000;
        int counts[3] = {0, 0, 0};
        for (int i = 0; i < draws; ++i) {
            const double mu = sample_depolarized_outcome(point, {1.0}, rng);
            counts[int(mu + 1)]++;
        }
        const double expect = draws / 3.0;
        double chi2 = 0;
        for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
        CHECK(chi2 < 9.21);  // chi^2_{2, 0.01}
    }
    SUBCASE("eps = 0.5, point mass: P(0) = 2/3") {
        Eigen::VectorXd point = Eigen::VectorXd::Zero(3);
        point[1] = 1.0;
        Rng rng(6);
        const int draws = 100000;
        int zero = 0;
        for (int i = 0; i < draws; ++i)
            if (sample_depolarized_outcome(point, {0.5}, rng) == 0.0) zero++;
        CHECK(double(zero) / draws == doctest::Approx(2.0 / 3.0).epsilon(0.02));
    }
    SUBCASE("eps = 0 leaves the distribution untouched") {
        const StateVector s = make_coherent_state(40);
        const Eigen::VectorXd dist = outcome_distribution(s, 0.2);
        Rng a(7), b(7);
        for (int i = 0; i < 200; ++i)
            CHECK(sample_depolarized_outcome(dist, {0.0}, a) == draw_from_distribution(dist, b));
    }
}

TEST_CASE("config validation") {
    Rng rng(1);
    CHECK_THROWS_AS(sample_dephasing_angle({-1.0}, rng), ConfigError);
    const SpinMoments m = spin_moments_analytic({100, 0.5});
    CHECK_THROWS_AS(depolarize_moments(m, {1.5}, 100), ConfigError);
    CHECK_THROWS_AS(depolarize_moments(m, {-0.1}, 100), ConfigError);
}
