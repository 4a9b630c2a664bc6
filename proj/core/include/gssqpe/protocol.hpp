#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "gssqpe/rng.hpp"
#include "gssqpe/schedule.hpp"
#include "gssqpe/types.hpp"

namespace gssqpe {

enum class SamplerMode { exact, gaussian, auto_select };

const char* to_string(SamplerMode mode);

struct TrialConfig {
    Schedule schedule;
    double theta_true = 0.0;  // in [-pi, pi)
    SamplerMode sampler = SamplerMode::auto_select;
    NoiseConfig noise;
    bool fluctuating_n = false;
    std::uint64_t rng_seed = 1;
};

struct StepRecord {
    int k = 0;
    double theta_k = 0;   // residual phase rotation applied at this step
    double mu = 0;        // measured J_z outcome
    double estimate = 0;  // theta_est^{(k)}
};

struct TrialResult {
    std::vector<StepRecord> per_step;
    double theta_true = 0;
    double theta_est_final = 0;
    double residual = 0;  // theta_est_final - theta_true
};

// Immutable per-schedule context: prepared states, calibrations and sampling
// plans, shared read-only by all trials of an ensemble.
class ProtocolContext {
  public:
    ProtocolContext(const Schedule& schedule, SamplerMode sampler, const NoiseConfig& noise,
                    bool fluctuating_n);

    TrialResult run(double theta, Rng& rng) const;

    const Schedule& schedule() const { return schedule_; }
    bool step_is_exact(int k) const;
    // calibrated estimator denominator for step k (noise-attenuated <Jx>)
    double jx_calibration(int k) const;

    struct Step;

  private:
    Schedule schedule_;
    SamplerMode sampler_;
    NoiseConfig noise_;
    bool fluctuating_n_;
    std::vector<std::shared_ptr<const Step>> steps_;

    double sample_step(const Step& s, double theta_k, Rng& rng) const;
    friend double sample_outcome(const ProtocolContext&, int, double, Rng&);
};

// One full cascade (and, for noise_truncated schedules, the repeat phase).
TrialResult run_trial(const TrialConfig& cfg);

// Shot-noise particle-number fluctuations: per step the true N is drawn as
// round(Normal(N_k, sqrt(N_k))), floored at 2; the estimator keeps the nominal
// calibration. Requires cfg.fluctuating_n.
TrialResult run_trial_fluctuating_n(const TrialConfig& cfg);

// Cascade to k~ followed by inverse-variance-weighted repeats of step k~.
// Requires a noise_truncated schedule and depolarization noise.
TrialResult run_trial_depolarized_with_repeats(const TrialConfig& cfg);

// Single-step outcome draw, exposed for tests.
double sample_outcome(const ProtocolContext& ctx, int k, double theta_k, Rng& rng);

// arcsin estimator with clamped ratio; zeroth step uses the half-angle form.
double estimate_step(double mu, double jx_expected, bool is_zeroth);

}  // namespace gssqpe
