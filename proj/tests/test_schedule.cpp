#include <doctest.h>

#include <cmath>
#include <vector>

#include "gssqpe/schedule.hpp"
#include "gssqpe/serialize.hpp"

using namespace gssqpe;

TEST_CASE("closed-form allocation") {
    CHECK(allocation_closed_form(100, 3) == std::vector<long long>{100, 400, 1200, 3600});
    CHECK(allocation_closed_form(100, 0) == std::vector<long long>{100});
    CHECK(n0_from_total(5300, 3) == doctest::Approx(100.0));
    CHECK_THROWS_AS(allocation_closed_form(9, 2), ConfigError);
}

TEST_CASE("closed-form squeezing: k=1 value and its asymptote") {
    const auto s2 = squeezing_closed_form(100, 8);
    CHECK(s2[0] == 1.0);
    CHECK(s2[1] == doctest::Approx(0.5 / std::pow(100.0, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(s2[1] == doctest::Approx(0.02321).epsilon(1e-3));
    // the displayed closed form saturates at s^2 N -> (3/2)^{3/2}, half of the
    // optimization recursion's sqrt(27/2) fixed point
    const auto ns = allocation_closed_form(100, 8);
    CHECK(s2[8] * double(ns[8]) == doctest::Approx(std::pow(1.5, 1.5)).epsilon(0.01));
}

TEST_CASE("recursive squeezing: first step and fixed point") {
    const auto ns = allocation_closed_form(100, 8);
    const auto s2 = squeezing_recursive(100, 8);
    // s_1^2 = (N_1^2 * 4/N_0)^{1/3} / N_1 = N_0^{-2/3}
    CHECK(s2[1] == doctest::Approx(std::pow(100.0, -2.0 / 3.0)).epsilon(1e-12));
    // s_k^2 N_k saturates to sqrt(27/2), within 2% from k = 6
    const double target = std::sqrt(27.0 / 2.0);
    for (int k = 6; k <= 8; ++k)
        CHECK(s2[k] * double(ns[k]) == doctest::Approx(target).epsilon(0.02));
    // monotone decreasing s_k
    for (int k = 1; k <= 8; ++k) CHECK(s2[k] < s2[k - 1]);
}

TEST_CASE("sherman-morrison solve") {
    SUBCASE("reproduces the closed-form allocation exactly") {
        CHECK(solve_allocation_sherman_morrison(3, 5300) ==
              std::vector<long long>{100, 400, 1200, 3600});
        CHECK(solve_allocation_sherman_morrison(1, 500) == std::vector<long long>{100, 400});
        for (int K : {1, 2, 4, 6}) {
            const auto direct = allocation_closed_form(37, K);
            long long total = 0;
            for (long long n : direct) total += n;
            CHECK(solve_allocation_sherman_morrison(K, total) == direct);
        }
    }
    SUBCASE("x ~ 4*3^{K-j} scaling from the diagonal inverse") {
        const auto n = solve_allocation_sherman_morrison(4, (2 * 81 - 1) * 50);
        for (int k = 1; k + 1 <= 4; ++k) CHECK(n[k + 1] == 3 * n[k]);
        CHECK(n[1] == 4 * n[0]);
    }
    SUBCASE("non-divisible totals keep the exact sum") {
        const long long total = 5300 + 37;
        const auto n = solve_allocation_sherman_morrison(3, total);
        long long sum = 0;
        for (long long v : n) sum += v;
        CHECK(sum == total);
    }
    SUBCASE("infeasible sizes are rejected") {
        CHECK_THROWS_AS(solve_allocation_sherman_morrison(3, 100), ConfigError);
        CHECK_THROWS_AS(solve_allocation_sherman_morrison(0, 500), ConfigError);
    }
}

TEST_CASE("predicted variance: zeroth step and Heisenberg prefactor") {
    const Schedule k0 = make_schedule_n0(100, 0, ScheduleMode::recursive_numeric);
    CHECK(k0.predicted_rms() == doctest::Approx(0.2).epsilon(1e-12));

    const Schedule k10 = make_schedule_n0(100, 10, ScheduleMode::recursive_numeric);
    const auto pred = predicted_variance(k10);
    CHECK(pred.alpha > 3.8);
    CHECK(pred.alpha < 4.3);
}

TEST_CASE("predicted variance: K=3 scaling exponent") {
    std::vector<double> lx, ly;
    for (long long n0 : {100, 300, 1000, 3000}) {
        const Schedule sch = make_schedule_n0(n0, 3, ScheduleMode::recursive_numeric);
        lx.push_back(std::log(double(sch.n_total)));
        ly.push_back(std::log(sch.predicted_rms()));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = int(lx.size());
    for (int i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-0.98).epsilon(0.025));
}

TEST_CASE("predicted variance: monotone in K, recursive beats closed form") {
    double prev_rec = 1e300, prev_clo = 1e300;
    for (int K = 0; K <= 8; ++K) {
        const double rec =
            make_schedule_n0(100, K, ScheduleMode::recursive_numeric).predicted_final_var;
        const double clo = make_schedule_n0(100, K, ScheduleMode::closed_form).predicted_final_var;
        CHECK(rec < prev_rec);
        CHECK(clo < prev_clo);
        CHECK(rec <= clo * (1 + 1e-12));
        prev_rec = rec;
        prev_clo = clo;
    }
}

TEST_CASE("schedule invariants: totals, ordering, decreasing predictions") {
    const Schedule sch = make_schedule_n0(100, 5, ScheduleMode::recursive_numeric);
    long long total = 0;
    for (const auto& st : sch.steps) total += st.n;
    CHECK(total == sch.n_total);
    CHECK(sch.n_total == (2 * 243 - 1) * 100);
    for (int k = 1; k <= 5; ++k) {
        CHECK(sch.steps[k].s2 < sch.steps[k - 1].s2);
        CHECK(sch.steps[k].predicted_var < sch.steps[k - 1].predicted_var);
        CHECK(sch.steps[k].s2 * double(sch.steps[k].n) >= 1.0);
    }
}

TEST_CASE("optimize_num_steps") {
    CHECK(optimize_num_steps(40) == 0);
    // exhaustive check at N_T = 5300
    int best_k = 0;
    double best = 1e300;
    for (int K = 0; K <= 6; ++K) {
        if (n0_from_total(5300, K) < 10) break;
        const double v = make_schedule_total(5300, K, ScheduleMode::recursive_numeric)
                             .predicted_final_var;
        if (v < best) {
            best = v;
            best_k = K;
        }
    }
    CHECK(optimize_num_steps(5300) == best_k);
    // grows like log_3(N_T)
    const int k3 = optimize_num_steps(1000);
    const int k6 = optimize_num_steps(1000000);
    CHECK(k6 > k3);
    CHECK(k6 - k3 >= 4);  // three decades ~ 6.3 steps of log_3
    CHECK(k6 - k3 <= 9);
}

TEST_CASE("depolarization truncation") {
    const Schedule base = make_schedule_n0(100, 8, ScheduleMode::recursive_numeric);
    SUBCASE("eps = 0 leaves the schedule unchanged") {
        const Schedule t = truncate_for_depolarization(base, 0.0);
        CHECK(t.K == base.K);
        CHECK(t.n_total == base.n_total);
        CHECK(t.repeats == 0);
    }
    SUBCASE("floor selects k~ and budget goes to repeats") {
        const Schedule t = truncate_for_depolarization(base, 1e-4);
        CHECK(t.K == 1);  // s_2^2 = 5.25e-3 < eps N_2 / 3 = 0.04
        CHECK(t.mode == ScheduleMode::noise_truncated);
        CHECK(t.repeats == (base.n_total - 500) / 400);
        CHECK(t.n_total <= base.n_total);
        const Schedule t8 = truncate_for_depolarization(base, 1e-8);
        CHECK(t8.K == 5);
    }
    SUBCASE("repeats average like 1/nu") {
        const Schedule small = make_schedule_n0(100, 2, ScheduleMode::recursive_numeric);
        Schedule a = truncate_for_depolarization(
            make_schedule_n0(100, 1, ScheduleMode::recursive_numeric), 1e-4);
        // grow the budget by rebuilding from a wider cascade target
        Schedule wide = make_schedule_n0(100, 1, ScheduleMode::recursive_numeric);
        wide.n_total *= 9;  // pretend a 9x budget
        Schedule b = truncate_for_depolarization(wide, 1e-4);
        CHECK(b.repeats > 5 * a.repeats);
        const double va = a.predicted_final_var, vb = b.predicted_final_var;
        const double ratio = vb / va;
        CHECK(ratio < double(a.repeats + 1) / double(b.repeats) * 1.6);
        (void)small;
    }
    SUBCASE("beta prediction lands near 1.75 eps^{1/4} at eps = 1e-6") {
        Schedule base6 = make_schedule_n0(100, 8, ScheduleMode::recursive_numeric);
        base6.n_total = 926900;  // cascade 48500? no: set a budget with many repeats
        const Schedule t = truncate_for_depolarization(base6, 1e-6);
        const double beta = std::sqrt(t.predicted_final_var * double(t.n_total));
        CHECK(beta / std::pow(1e-6, 0.25) == doctest::Approx(1.75).epsilon(0.25));
    }
}

TEST_CASE("step0 quadrature: reduces to 4/N noiseless, grows under noise") {
    CHECK(step0_variance(100, {}) == doctest::Approx(0.04).epsilon(1e-14));
    NoiseConfig soft;
    soft.dephasing = DephasingConfig{1e6};
    CHECK(step0_variance(100, soft) == doctest::Approx(0.04).epsilon(0.01));
    NoiseConfig hard;
    hard.dephasing = DephasingConfig{10.0};
    const double v = step0_variance(100, hard);
    CHECK(v > 0.04);
    CHECK(v < 1.0);
}

TEST_CASE("schedule json round trip") {
    NoiseConfig noise;
    noise.depolarization = DepolarizationConfig{1e-4};
    const Schedule t =
        truncate_for_depolarization(make_schedule_n0(100, 6, ScheduleMode::recursive_numeric,
                                                     noise),
                                    1e-4);
    const Schedule back = schedule_from_json(schedule_to_json(t));
    CHECK(back.mode == t.mode);
    CHECK(back.K == t.K);
    CHECK(back.n_total == t.n_total);
    CHECK(back.repeats == t.repeats);
    CHECK(back.repeat_var == t.repeat_var);
    REQUIRE(back.steps.size() == t.steps.size());
    for (size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(back.steps[i].n == t.steps[i].n);
        CHECK(back.steps[i].s2 == t.steps[i].s2);
        CHECK(back.steps[i].predicted_var == t.steps[i].predicted_var);
    }
    CHECK(back.noise.depolarization.has_value());
}
