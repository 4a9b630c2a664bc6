#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gssqpe/channels.hpp"
#include "gssqpe/types.hpp"

namespace gssqpe {

enum class ScheduleMode { closed_form, recursive_numeric, noise_truncated };

const char* to_string(ScheduleMode mode);

struct NoiseConfig {
    std::optional<DephasingConfig> dephasing;
    std::optional<DepolarizationConfig> depolarization;

    bool any() const { return dephasing.has_value() || depolarization.has_value(); }
};

struct ScheduleStep {
    int k = 0;
    long long n = 0;        // particles N_k
    double s2 = 1.0;        // squeezing parameter s_k^2 (s_0 = 1)
    double predicted_var = 0.0;     // running Delta^2 theta_{est,k}, full recursion
    double predicted_var_lo = 0.0;  // same, leading-order recursion
};

struct Schedule {
    ScheduleMode mode = ScheduleMode::recursive_numeric;
    int K = 0;
    long long n_total = 0;
    std::vector<ScheduleStep> steps;  // size K+1
    NoiseConfig noise;                // noise the predictions were computed for

    // noise_truncated mode: cascade runs to k = K, then `repeats` more copies of
    // step K combined by inverse-variance weighting
    long long repeats = 0;
    double repeat_var = 0.0;    // predicted per-repeat variance
    double predicted_final_var = 0.0;
    std::string warning;

    double predicted_rms() const;
};

struct SensitivityPrediction {
    std::vector<double> per_step_var;      // full recursion
    std::vector<double> per_step_var_lo;   // leading-order recursion
    double final_var = 0.0;
    double final_rms = 0.0;
    double alpha = 0.0;  // Delta theta * N_T^{1 - 1/(2*3^K)}
};

// N_k = 4 * 3^{k-1} N_0 for k >= 1; total (2*3^K - 1) N_0.
std::vector<long long> allocation_closed_form(long long n0, int K);

// s_k^2 from the displayed closed form (verbatim double-exponent expression); s_0^2 = 1.
std::vector<double> squeezing_closed_form(long long n0, int K);

// s_k^2 from the optimization recursion s_k^2 N_k = (N_k^2 Delta^2_{k-1})^{1/3}
// iterated with the leading-order variance recursion; fixed point s^2 N -> sqrt(27/2).
std::vector<double> squeezing_recursive(long long n0, int K);

// N_0 = N_T / (2*3^K - 1), real-valued.
double n0_from_total(long long n_total, int K);

// Diagonal-plus-rank-one solve (A + u u^T) x = N_T u via Sherman-Morrison,
// then largest-remainder rounding preserving the total. Returns [N_0 ... N_K].
std::vector<long long> solve_allocation_sherman_morrison(int K, long long n_total);

// Full and leading-order variance recursions for a given schedule, using
// noise-transformed moments when noise is configured. The k = 0 initial
// condition is 4/N_0 noiseless and a direct quadrature of the step-0 estimator
// second moment under noise.
SensitivityPrediction predicted_variance(const Schedule& schedule);
SensitivityPrediction predicted_variance(const Schedule& schedule, const NoiseConfig& noise);

// Schedule builders. Predictions are filled for the given noise.
Schedule make_schedule_n0(long long n0, int K, ScheduleMode mode, const NoiseConfig& noise = {});
Schedule make_schedule_total(long long n_total, int K, ScheduleMode mode,
                             const NoiseConfig& noise = {});

// Smallest predicted final variance over feasible K (N_0 >= 10), ties to smaller K.
int optimize_num_steps(long long n_total);

// Cut the cascade at the largest k with s_k^2 >= eps N_k / 3 and spend the rest
// of the budget on integer repeats of that step.
Schedule truncate_for_depolarization(const Schedule& schedule, double epsilon);

// Predicted step-0 estimator variance (quadrature under noise, exact 4/N without).
double step0_variance(long long n0, const NoiseConfig& noise);

}  // namespace gssqpe
