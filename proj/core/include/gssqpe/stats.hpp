#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gssqpe/protocol.hpp"

namespace gssqpe {

enum class ThetaMode { uniform, fixed };

struct EnsembleConfig {
    int trials = 10000;
    ThetaMode theta_mode = ThetaMode::uniform;
    double theta_fixed = 0.0;
    Schedule schedule;
    SamplerMode sampler = SamplerMode::auto_select;
    NoiseConfig noise;
    bool fluctuating_n = false;
    std::uint64_t master_seed = 1;
    int workers = 0;  // 0: hardware concurrency; has no effect on results
};

struct ErrorProbPoint {
    double x = 0;          // eps * N_T / 4
    double epsilon = 0;    // threshold on |residual|
    double empirical = 0;  // P(|residual| >= eps)
    double predicted = 0;  // 1 - erf(x / sqrt(2))
};

struct Histogram {
    std::vector<double> edges;      // size bins+1
    std::vector<long long> counts;  // size bins
};

struct GaussianityReport {
    double bias_z = 0;       // mean / (sd / sqrt(n))
    double ks_distance = 0;  // sup |F_emp - Phi(r / rms)|
    bool bias_ok = false;    // |bias_z| <= 3
    bool ks_ok = false;      // ks <= 0.03
};

struct EnsembleStats {
    long long trials = 0;
    long long n_total = 0;
    double rms_sensitivity = 0;  // sqrt(mean(residual^2))
    double rms_se = 0;           // standard error of the rms, normal approximation
    double bias = 0;             // mean residual
    double bias_z = 0;
    double nt_times_delta = 0;   // N_T * rms
    double predicted_rms = 0;    // from the schedule's variance recursion
    Histogram histogram;
    std::vector<ErrorProbPoint> error_prob;
    GaussianityReport gaussianity;

    // per-trial data, index = trial id
    std::vector<double> thetas;
    std::vector<double> estimates;
    std::vector<double> residuals;
};

// Deterministic given master_seed: per-trial seeds are derived by counter-based
// mixing, results are independent of worker count and scheduling.
EnsembleStats run_ensemble(const EnsembleConfig& cfg);

// Exceedance curve on the scaled axis x = eps N_T / 4 over a uniform grid.
std::vector<ErrorProbPoint> error_probability_curve(const std::vector<double>& residuals,
                                                    long long n_total, double x_max = 3.0,
                                                    int points = 61);

GaussianityReport gaussianity_check(const std::vector<double>& residuals);

double rms_of(const std::vector<double>& xs);

}  // namespace gssqpe
