#include "gssqpe/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <thread>

namespace gssqpe {

double rms_of(const std::vector<double>& xs) {
    double acc = 0;
    for (double x : xs) acc += x * x;
    return std::sqrt(acc / double(xs.size()));
}

EnsembleStats run_ensemble(const EnsembleConfig& cfg) {
    if (cfg.trials < 100) throw ConfigError("run_ensemble: need at least 100 trials");
    const ProtocolContext ctx(cfg.schedule, cfg.sampler, cfg.noise, cfg.fluctuating_n);

    EnsembleStats st;
    st.trials = cfg.trials;
    st.n_total = cfg.schedule.n_total;
    st.thetas.resize(cfg.trials);
    st.estimates.resize(cfg.trials);
    st.residuals.resize(cfg.trials);

    int workers = cfg.workers > 0 ? cfg.workers : int(std::thread::hardware_concurrency());
    workers = std::clamp(workers, 1, 64);

    std::atomic<long long> next{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex err_mtx;

    auto worker = [&] {
        for (;;) {
            const long long i = next.fetch_add(1);
            if (i >= cfg.trials || failed.load()) break;
            try {
                Rng rng(derive_seed(cfg.master_seed, std::uint64_t(i)));
                const double theta = (cfg.theta_mode == ThetaMode::uniform)
                                         ? rng.uniform(-std::numbers::pi, std::numbers::pi)
                                         : cfg.theta_fixed;
                const TrialResult r = ctx.run(theta, rng);
                st.thetas[i] = r.theta_true;
                st.estimates[i] = r.theta_est_final;
                st.residuals[i] = r.residual;
            } catch (const std::exception& e) {
                std::scoped_lock lock(err_mtx);
                if (!failed.exchange(true))
                    first_error = "trial " + std::to_string(i) + ": " + e.what();
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw NumericalError("run_ensemble: " + first_error);

    st.rms_sensitivity = rms_of(st.residuals);
    st.rms_se = st.rms_sensitivity / std::sqrt(2.0 * double(cfg.trials));
    double mean = 0;
    for (double r : st.residuals) mean += r;
    mean /= double(cfg.trials);
    st.bias = mean;
    double var = 0;
    for (double r : st.residuals) var += (r - mean) * (r - mean);
    var /= double(cfg.trials - 1);
    st.bias_z = mean / std::sqrt(var / double(cfg.trials));
    st.nt_times_delta = double(st.n_total) * st.rms_sensitivity;
    st.predicted_rms = cfg.schedule.predicted_rms();

    // histogram over +-5 rms, fixed 81 bins (depends only on the data, so it is
    // deterministic for a given seed)
    const int bins = 81;
    const double hw = 5.0 * std::max(st.rms_sensitivity, 1e-300);
    st.histogram.edges.resize(bins + 1);
    st.histogram.counts.assign(bins, 0);
    for (int b = 0; b <= bins; ++b)
        st.histogram.edges[b] = -hw + 2.0 * hw * double(b) / double(bins);
    for (double r : st.residuals) {
        const int b = int(std::floor((r + hw) / (2.0 * hw) * bins));
        if (b >= 0 && b < bins) st.histogram.counts[b]++;
    }

    if (cfg.trials >= 1000) {
        st.error_prob = error_probability_curve(st.residuals, st.n_total);
        st.gaussianity = gaussianity_check(st.residuals);
    }
    return st;
}

std::vector<ErrorProbPoint> error_probability_curve(const std::vector<double>& residuals,
                                                    long long n_total, double x_max, int points) {
    if (residuals.size() < 1000)
        throw ConfigError("error_probability_curve: need at least 1e3 trials");
    std::vector<double> abs_sorted(residuals.size());
    std::transform(residuals.begin(), residuals.end(), abs_sorted.begin(),
                   [](double r) { return std::abs(r); });
    std::sort(abs_sorted.begin(), abs_sorted.end());
    const double n = double(abs_sorted.size());

    std::vector<ErrorProbPoint> curve(points);
    for (int i = 0; i < points; ++i) {
        ErrorProbPoint& p = curve[i];
        p.x = x_max * double(i) / double(points - 1);
        p.epsilon = 4.0 * p.x / double(n_total);
        const auto it = std::lower_bound(abs_sorted.begin(), abs_sorted.end(), p.epsilon);
        p.empirical = double(abs_sorted.end() - it) / n;
        p.predicted = 1.0 - std::erf(p.x / std::numbers::sqrt2);
    }
    return curve;
}

GaussianityReport gaussianity_check(const std::vector<double>& residuals) {
    if (residuals.size() < 1000) throw ConfigError("gaussianity_check: need at least 1e3 trials");
    GaussianityReport rep;
    const double n = double(residuals.size());
    double mean = 0;
    for (double r : residuals) mean += r;
    mean /= n;
    double var = 0;
    for (double r : residuals) var += (r - mean) * (r - mean);
    var /= (n - 1.0);
    rep.bias_z = mean / std::sqrt(var / n);

    const double rms = rms_of(residuals);
    std::vector<double> sorted = residuals;
    std::sort(sorted.begin(), sorted.end());
    double ks = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double phi = 0.5 * (1.0 + std::erf(sorted[i] / (rms * std::numbers::sqrt2)));
        ks = std::max(ks, std::abs(double(i + 1) / n - phi));
        ks = std::max(ks, std::abs(phi - double(i) / n));
    }
    rep.ks_distance = ks;
    rep.bias_ok = std::abs(rep.bias_z) <= 3.0;
    rep.ks_ok = ks <= 0.03;
    return rep;
}

}  // namespace gssqpe
