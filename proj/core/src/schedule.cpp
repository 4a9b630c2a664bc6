#include "gssqpe/schedule.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "step_moments.hpp"

namespace gssqpe {

namespace {
constexpr double pi = std::numbers::pi;
using detail::StepMoments;

long long pow3(int k) {
    long long p = 1;
    while (k-- > 0) p *= 3;
    return p;
}

StepMoments noisy_step_moments(long long n, double s2, int k, const NoiseConfig& noise,
                               const std::optional<FourierCoefficients>& fc) {
    StepMoments m = detail::clean_step_moments(double(n), s2, k);
    if (fc) m = detail::dephase_avg_moments(m, *fc);
    if (noise.depolarization)
        m = detail::depolarize_step_moments(m, double(n), noise.depolarization->epsilon);
    return m;
}

// Gauss-Hermite (probabilists') nodes/weights via Golub-Welsch.
void hermite_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = std::sqrt(double(i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()[i];
        const double v0 = es.eigenvectors()(0, i);
        w[i] = v0 * v0;  // weights sum to 1
    }
}
}  // namespace

const char* to_string(ScheduleMode mode) {
    switch (mode) {
        case ScheduleMode::closed_form: return "closed_form";
        case ScheduleMode::recursive_numeric: return "recursive_numeric";
        case ScheduleMode::noise_truncated: return "noise_truncated";
    }
    return "?";
}

double Schedule::predicted_rms() const { return std::sqrt(predicted_final_var); }

std::vector<long long> allocation_closed_form(long long n0, int K) {
    if (n0 < 10) throw ConfigError("allocation: N_0 must be >= 10");
    if (K < 0) throw ConfigError("allocation: K must be >= 0");
    std::vector<long long> out(K + 1);
    out[0] = n0;
    for (int k = 1; k <= K; ++k) out[k] = 4 * pow3(k - 1) * n0;
    return out;
}

std::vector<double> squeezing_closed_form(long long n0, int K) {
    std::vector<double> s2(K + 1, 1.0);
    for (int k = 1; k <= K; ++k) {
        const double inv3 = 1.0 / double(pow3(k - 1));
        const double a3 = 2.5 - 1.5 * inv3 - k;
        const double b2 = 3.5 - 2.5 * inv3;
        s2[k] = std::pow(3.0, a3) / std::pow(2.0, b2) /
                std::pow(double(n0), 1.0 - 1.0 / double(pow3(k)));
    }
    return s2;
}

std::vector<double> squeezing_recursive(long long n0, int K) {
    const auto ns = allocation_closed_form(n0, K);
    std::vector<double> s2(K + 1, 1.0);
    double d2 = 4.0 / double(n0);
    for (int k = 1; k <= K; ++k) {
        const double N = double(ns[k]);
        const double y = std::cbrt(N * N * d2);  // s_k^2 N_k
        s2[k] = y / N;
        d2 = s2[k] / N + d2 / (2.0 * s2[k] * s2[k] * N * N);
    }
    return s2;
}

double n0_from_total(long long n_total, int K) {
    return double(n_total) / double(2 * pow3(K) - 1);
}

std::vector<long long> solve_allocation_sherman_morrison(int K, long long n_total) {
    if (K < 1) throw ConfigError("sherman-morrison: K must be >= 1");
    if (n_total < (2 * pow3(K) - 1) * 10)
        throw ConfigError("sherman-morrison: N_T too small for K (N_0 floor is 10)");
    // x = (N_K ... N_1), A = (1/4) diag(3^{-(K-1)} ... 3^0), (A + u u^T) x = N_T u
    Eigen::VectorXd adiag(K), u = Eigen::VectorXd::Ones(K);
    for (int j = 0; j < K; ++j) adiag[j] = 0.25 / double(pow3(K - 1 - j));
    const Eigen::VectorXd ainv_u = u.cwiseQuotient(adiag);
    const double denom = 1.0 + u.dot(ainv_u);
    const Eigen::VectorXd x = (double(n_total) / denom) * ainv_u;

    // assemble real-valued [v_0 ... v_K]
    std::vector<double> v(K + 1);
    v[0] = double(n_total) / denom;
    for (int k = 1; k <= K; ++k) v[k] = x[K - k];
    // largest-remainder rounding preserving the total
    std::vector<long long> n(K + 1);
    long long used = 0;
    std::vector<std::pair<double, int>> rema(K + 1);
    for (int k = 0; k <= K; ++k) {
        n[k] = (long long)std::floor(v[k]);
        used += n[k];
        rema[k] = {v[k] - std::floor(v[k]), k};
    }
    std::sort(rema.begin(), rema.end(), [](auto& a, auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (long long r = n_total - used, i = 0; r > 0; --r, ++i) n[rema[i % rema.size()].second] += 1;
    for (int k = 0; k <= K; ++k)
        if (n[k] < 2) throw ConfigError("sherman-morrison: infeasible N_T, some N_k < 2");
    return n;
}

double step0_variance(long long n0, const NoiseConfig& noise) {
    if (!noise.any()) return 4.0 / double(n0);
    std::optional<FourierCoefficients> fc;
    if (noise.dephasing) fc = fourier_coefficients(*noise.dephasing);
    const double N = double(n0);
    const double jx_cal = detail::signal_attenuation(noise, fc) * N / 2;

    std::vector<double> z, wz;
    hermite_nodes(21, z, wz);
    const int nth = 129, nphi = 129;
    std::vector<double> phis, wphi;
    if (noise.dephasing && noise.dephasing->gamma >= 0) {
        double tot = 0;
        for (int p = 0; p < nphi; ++p) {
            const double phi = ((p + 0.5) / nphi) * 2 * pi - pi;
            const double w = std::exp(noise.dephasing->gamma * (std::cos(phi) - 1.0));
            phis.push_back(phi);
            wphi.push_back(w);
            tot += w;
        }
        for (auto& w : wphi) w /= tot;
    } else {
        phis = {0.0};
        wphi = {1.0};
    }

    const StepMoments m0 = detail::clean_step_moments(N, 1.0, 0);
    double acc = 0.0;
    for (int t = 0; t < nth; ++t) {
        const double th = ((t + 0.5) / nth) * 2 * pi - pi;
        const double sh = std::sin(th / 2), ch = std::cos(th / 2);
        for (size_t p = 0; p < phis.size(); ++p) {
            StepMoments m = detail::rotate_y_moments(m0, phis[p]);
            if (noise.depolarization)
                m = detail::depolarize_step_moments(m, N, noise.depolarization->epsilon);
            const double mean = m.jx * sh;
            const double var = std::max(m.jy2 * ch * ch + m.var_x() * sh * sh, 0.0);
            const double sd = std::sqrt(var);
            double inner = 0.0;
            for (size_t q = 0; q < z.size(); ++q) {
                const double mu = mean + sd * z[q];
                const double est = 2.0 * std::asin(std::clamp(mu / jx_cal, -1.0, 1.0));
                inner += wz[q] * (est - th) * (est - th);
            }
            acc += wphi[p] * inner;
        }
    }
    return acc / nth;
}

SensitivityPrediction predicted_variance(const Schedule& schedule) {
    return predicted_variance(schedule, schedule.noise);
}

SensitivityPrediction predicted_variance(const Schedule& schedule, const NoiseConfig& noise) {
    SensitivityPrediction pred;
    std::optional<FourierCoefficients> fc;
    if (noise.dephasing) fc = fourier_coefficients(*noise.dephasing);

    double d2 = 0, d2_lo = 0;
    for (const auto& st : schedule.steps) {
        if (st.k == 0) {
            d2 = step0_variance(st.n, noise);
            d2_lo = noise.any() ? d2 : 4.0 / double(st.n);
        } else {
            const StepMoments m = noisy_step_moments(st.n, st.s2, st.k, noise, fc);
            d2 = (m.jy2 + m.var_x() * d2) / (m.jx * m.jx);
            // leading order in s^2 N >> 1 (noiseless shape)
            const double N = double(st.n);
            d2_lo = st.s2 / N + d2_lo / (2.0 * st.s2 * st.s2 * N * N);
        }
        pred.per_step_var.push_back(d2);
        pred.per_step_var_lo.push_back(d2_lo);
    }
    pred.final_var = d2;
    if (schedule.mode == ScheduleMode::noise_truncated && schedule.repeats > 0) {
        const auto& last = schedule.steps.back();
        const StepMoments m = noisy_step_moments(last.n, last.s2, last.k, noise, fc);
        double v_rep = m.jy2 / (m.jx * m.jx);
        if (last.k == 0) v_rep *= 4.0;
        pred.final_var = 1.0 / (1.0 / d2 + double(schedule.repeats) / v_rep);
    }
    pred.final_rms = std::sqrt(pred.final_var);
    const int K = schedule.steps.empty() ? 0 : schedule.steps.back().k;
    pred.alpha = pred.final_rms *
                 std::pow(double(schedule.n_total), 1.0 - 1.0 / (2.0 * double(pow3(K))));
    return pred;
}

namespace {
Schedule assemble(std::vector<long long> ns, ScheduleMode mode, const NoiseConfig& noise) {
    Schedule sch;
    sch.mode = mode;
    sch.noise = noise;
    int K = int(ns.size()) - 1;
    std::vector<double> s2;
    for (;;) {
        s2 = (mode == ScheduleMode::closed_form) ? squeezing_closed_form(ns[0], K)
                                                 : squeezing_recursive(ns[0], K);
        // analytic-moment validity floor
        int bad = -1;
        for (int k = 1; k <= K; ++k)
            if (s2[k] * double(ns[k]) < 1.0) bad = k;
        if (bad < 0) break;
        K = bad - 1;
        ns.resize(K + 1);
        sch.warning = "downgraded K to " + std::to_string(K) + ": s_k^2 N_k < 1";
    }
    sch.K = K;
    sch.n_total = std::accumulate(ns.begin(), ns.end(), 0LL);
    sch.steps.resize(K + 1);
    for (int k = 0; k <= K; ++k) sch.steps[k] = {k, ns[k], s2[k], 0.0, 0.0};
    const auto pred = predicted_variance(sch, noise);
    for (int k = 0; k <= K; ++k) {
        sch.steps[k].predicted_var = pred.per_step_var[k];
        sch.steps[k].predicted_var_lo = pred.per_step_var_lo[k];
    }
    sch.predicted_final_var = pred.final_var;
    return sch;
}
}  // namespace

Schedule make_schedule_n0(long long n0, int K, ScheduleMode mode, const NoiseConfig& noise) {
    if (mode == ScheduleMode::noise_truncated)
        throw ConfigError("make_schedule: build a cascade first, then truncate_for_depolarization");
    return assemble(allocation_closed_form(n0, K), mode, noise);
}

Schedule make_schedule_total(long long n_total, int K, ScheduleMode mode,
                             const NoiseConfig& noise) {
    if (mode == ScheduleMode::noise_truncated)
        throw ConfigError("make_schedule: build a cascade first, then truncate_for_depolarization");
    if (K == 0) {
        if (n_total < 10) throw ConfigError("make_schedule: N_T must be >= 10 for K = 0");
        return assemble({n_total}, mode, noise);
    }
    return assemble(solve_allocation_sherman_morrison(K, n_total), mode, noise);
}

int optimize_num_steps(long long n_total) {
    if (n_total < 30) throw ConfigError("optimize_num_steps: N_T must be >= 30");
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int K = 0;; ++K) {
        if (n0_from_total(n_total, K) < 10.0) break;
        Schedule sch;
        try {
            sch = make_schedule_total(n_total, K, ScheduleMode::recursive_numeric);
        } catch (const ConfigError&) {
            break;
        }
        if (sch.predicted_final_var < best * (1.0 - 1e-12)) {
            best = sch.predicted_final_var;
            best_k = K;
        }
    }
    return best_k;
}

Schedule truncate_for_depolarization(const Schedule& schedule, double epsilon) {
    if (epsilon < 0) throw ConfigError("truncate: eps must be >= 0");
    if (epsilon == 0) return schedule;  // noiseless: k~ = K, nothing to cut
    const long long budget = schedule.n_total;
    int kt = 0;
    for (int k = 1; k <= schedule.K; ++k) {
        const auto& st = schedule.steps[k];
        if (st.s2 >= epsilon * double(st.n) / 3.0) kt = k;
        else break;
    }
    Schedule out;
    out.mode = ScheduleMode::noise_truncated;
    out.noise = schedule.noise;
    if (!out.noise.depolarization) out.noise.depolarization = DepolarizationConfig{epsilon};
    out.K = kt;
    out.steps.assign(schedule.steps.begin(), schedule.steps.begin() + kt + 1);
    long long casc = 0;
    for (const auto& st : out.steps) casc += st.n;
    out.repeats = std::max<long long>(0, (budget - casc) / out.steps.back().n);
    out.n_total = casc + out.repeats * out.steps.back().n;

    const auto pred = predicted_variance(out, out.noise);
    for (int k = 0; k <= kt; ++k) {
        out.steps[k].predicted_var = pred.per_step_var[k];
        out.steps[k].predicted_var_lo = pred.per_step_var_lo[k];
    }
    out.predicted_final_var = pred.final_var;
    {
        std::optional<FourierCoefficients> fc;
        if (out.noise.dephasing) fc = fourier_coefficients(*out.noise.dephasing);
        const auto& last = out.steps.back();
        const StepMoments m = noisy_step_moments(last.n, last.s2, last.k, out.noise, fc);
        out.repeat_var = m.jy2 / (m.jx * m.jx) * (last.k == 0 ? 4.0 : 1.0);
    }
    return out;
}

}  // namespace gssqpe
