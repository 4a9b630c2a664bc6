#include "gssqpe/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gssqpe/dicke.hpp"
#include "step_moments.hpp"

namespace gssqpe {

namespace {
using detail::StepMoments;

double round_to_grid(double x, double n) {
    // mu grid: -n/2, -n/2+1, ..., n/2 (half-integers when n is odd)
    const double idx = std::clamp(std::round(x + 0.5 * n), 0.0, n);
    return idx - 0.5 * n;
}
}  // namespace

const char* to_string(SamplerMode mode) {
    switch (mode) {
        case SamplerMode::exact: return "exact";
        case SamplerMode::gaussian: return "gaussian";
        case SamplerMode::auto_select: return "auto";
    }
    return "?";
}

struct ProtocolContext::Step {
    int k = 0;
    long long n = 0;
    double s2 = 1.0;
    bool exact = false;
    std::shared_ptr<const StateVector> state;  // prepared clean state, exact path only
    StepMoments clean;                         // clean moments (analytic for k >= 1)
    double jx_clean = 0;                       // <Jx> used for calibration before attenuation
    double jx_cal = 0;                         // attenuated calibration
    double att = 1.0;                          // c1 (1 - eps)
};

ProtocolContext::ProtocolContext(const Schedule& schedule, SamplerMode sampler,
                                 const NoiseConfig& noise, bool fluctuating_n)
    : schedule_(schedule), sampler_(sampler), noise_(noise), fluctuating_n_(fluctuating_n) {
    std::optional<FourierCoefficients> fc;
    if (noise_.dephasing) fc = fourier_coefficients(*noise_.dephasing);
    const double att = detail::signal_attenuation(noise_, fc);

    for (const auto& st : schedule_.steps) {
        auto step = std::make_shared<Step>();
        step->k = st.k;
        step->n = st.n;
        step->s2 = st.s2;
        step->att = att;
        const bool fits = st.n <= exact_cap();
        switch (sampler_) {
            case SamplerMode::exact:
                if (!fits)
                    throw ConfigError("sampler=exact requires all N_k <= exact cap (" +
                                      std::to_string(exact_cap()) + "), got N_" +
                                      std::to_string(st.k) + " = " + std::to_string(st.n));
                step->exact = true;
                break;
            case SamplerMode::gaussian: step->exact = false; break;
            case SamplerMode::auto_select: step->exact = fits; break;
        }
        step->clean = detail::clean_step_moments(double(st.n), st.s2, st.k);
        if (step->exact && !fluctuating_n_) {
            StateVector psi = (st.k == 0) ? make_coherent_state(int(st.n))
                                          : make_gss({int(st.n), std::sqrt(st.s2)});
            const SpinMoments m = spin_moments_exact(psi);
            step->jx_clean = m.jx;  // calibrate on the true prepared state
            step->state = std::make_shared<const StateVector>(std::move(psi));
        } else {
            step->jx_clean = step->clean.jx;
        }
        step->jx_cal = att * step->jx_clean;
        steps_.push_back(std::move(step));
    }
}

bool ProtocolContext::step_is_exact(int k) const { return steps_.at(k)->exact; }
double ProtocolContext::jx_calibration(int k) const { return steps_.at(k)->jx_cal; }

double estimate_step(double mu, double jx_expected, bool is_zeroth) {
    if (!(jx_expected > 0)) throw ConfigError("estimate_step: jx_expected must be > 0");
    const double r = std::clamp(mu / jx_expected, -1.0, 1.0);
    return is_zeroth ? 2.0 * std::asin(r) : std::asin(r);
}

double ProtocolContext::sample_step(const Step& s, double theta_k, Rng& rng) const {
    long long n_true = s.n;
    if (fluctuating_n_) {
        const double drawn = std::round(double(s.n) + std::sqrt(double(s.n)) * rng.normal());
        n_true = std::max<long long>(2, (long long)drawn);
    }

    const bool exact_now = s.exact && n_true <= exact_cap();
    if (exact_now) {
        // prepared state, possibly rebuilt at the fluctuated particle number
        const StateVector* psi = s.state.get();
        StateVector local;
        if (!psi || n_true != s.n) {
            local = (s.k == 0) ? make_coherent_state(int(n_true))
                               : make_gss({int(n_true), std::sqrt(s.s2)});
            psi = &local;
        }
        StateVector dephased;
        if (noise_.dephasing) {
            const double phi = rng.vonmises(noise_.dephasing->gamma);
            dephased = apply_rotation_y(*psi, phi);
            psi = &dephased;
        }
        const Eigen::VectorXd dist = outcome_distribution(*psi, theta_k);
        if (noise_.depolarization)
            return sample_depolarized_outcome(dist, *noise_.depolarization, rng);
        return draw_from_distribution(dist, rng);
    }

    // Gaussian path: moments of the prepared state, transformed per noise model
    StepMoments m = (n_true == s.n) ? s.clean
                                    : detail::clean_step_moments(double(n_true), s.s2, s.k);
    if (noise_.dephasing) {
        const double phi = rng.vonmises(noise_.dephasing->gamma);
        m = detail::rotate_y_moments(m, phi);
    }
    if (noise_.depolarization)
        m = detail::depolarize_step_moments(m, double(n_true), noise_.depolarization->epsilon);
    const double mean = m.jx * std::sin(theta_k);
    const double c = std::cos(theta_k), sn = std::sin(theta_k);
    const double var = std::max(m.jy2 * c * c + m.var_x() * sn * sn, 0.0);
    const double mu = mean + std::sqrt(var) * rng.normal();
    return round_to_grid(mu, double(n_true));
}

TrialResult ProtocolContext::run(double theta, Rng& rng) const {
    TrialResult out;
    out.theta_true = theta;
    double acc = 0.0;  // running sum of estimates
    for (const auto& sp : steps_) {
        const Step& s = *sp;
        const double theta_k = (s.k == 0) ? theta / 2 : theta - acc;
        const double mu = sample_step(s, theta_k, rng);
        const double est = estimate_step(mu, s.jx_cal, s.k == 0);
        acc += est;
        out.per_step.push_back({s.k, theta_k, mu, est});
    }
    if (schedule_.mode == ScheduleMode::noise_truncated && schedule_.repeats > 0) {
        const Step& s = *steps_.back();
        const double v_c = std::max(schedule_.steps.back().predicted_var, 1e-300);
        const double v_rep = std::max(schedule_.repeat_var, 1e-300);
        double w = 1.0 / v_c;
        for (long long r = 0; r < schedule_.repeats; ++r) {
            const double theta_r = theta - acc;
            const double mu = sample_step(s, theta_r, rng);
            const double est = acc + estimate_step(mu, s.jx_cal, s.k == 0);
            acc = (w * acc + est / v_rep) / (w + 1.0 / v_rep);
            w += 1.0 / v_rep;
        }
    }
    out.theta_est_final = acc;
    out.residual = acc - theta;
    return out;
}

double sample_outcome(const ProtocolContext& ctx, int k, double theta_k, Rng& rng) {
    return ctx.sample_step(*ctx.steps_.at(k), theta_k, rng);
}

namespace {
TrialResult run_with(const TrialConfig& cfg) {
    ProtocolContext ctx(cfg.schedule, cfg.sampler, cfg.noise, cfg.fluctuating_n);
    Rng rng(cfg.rng_seed);
    return ctx.run(cfg.theta_true, rng);
}
}  // namespace

TrialResult run_trial(const TrialConfig& cfg) { return run_with(cfg); }

TrialResult run_trial_fluctuating_n(const TrialConfig& cfg) {
    if (!cfg.fluctuating_n) throw ConfigError("run_trial_fluctuating_n: set fluctuating_n");
    return run_with(cfg);
}

TrialResult run_trial_depolarized_with_repeats(const TrialConfig& cfg) {
    if (cfg.schedule.mode != ScheduleMode::noise_truncated)
        throw ConfigError("run_trial_depolarized_with_repeats: schedule must be noise_truncated");
    if (!cfg.noise.depolarization || !(cfg.noise.depolarization->epsilon > 0))
        throw ConfigError("run_trial_depolarized_with_repeats: depolarization noise required");
    return run_with(cfg);
}

}  // namespace gssqpe
