// Command line front end: schedule inspection, Monte-Carlo runs, and the
// figure-reproduction sweeps. Emits CSV/JSON only; exit codes: 0 ok, 2 bad
// configuration, 3 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gssqpe/dicke.hpp"
#include "gssqpe/serialize.hpp"
#include "gssqpe/stats.hpp"

using namespace gssqpe;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    long long n0 = 0, nt = 0;
    int k = -1;
    bool auto_k = false;
    std::string mode = "auto";      // auto | closed | recursive
    std::string sampler = "auto";   // exact | gaussian | auto
    std::string noise = "none";     // none | dephasing:G | depol:E
    bool truncate = false;
    bool fluctuating_n = false;
    int trials = 10000;
    std::uint64_t seed = 1;
    double theta = std::nan("");
    int workers = 0;
    int exact_cap_opt = 4096;
    std::string out_dir = ".";
    std::string config_path;
};

NoiseConfig parse_noise(const std::string& spec) {
    NoiseConfig noise;
    if (spec.empty() || spec == "none") return noise;
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("noise spec must be kind:value, got " + spec);
    const std::string kind = spec.substr(0, colon);
    const double value = std::stod(spec.substr(colon + 1));
    if (kind == "dephasing") noise.dephasing = DephasingConfig{value};
    else if (kind == "depol") noise.depolarization = DepolarizationConfig{value};
    else throw ConfigError("unknown noise kind: " + kind);
    return noise;
}

SamplerMode parse_sampler(const std::string& s) {
    if (s == "exact") return SamplerMode::exact;
    if (s == "gaussian") return SamplerMode::gaussian;
    if (s == "auto") return SamplerMode::auto_select;
    throw ConfigError("unknown sampler: " + s);
}

// schedule in the requested mode; "auto" logs both and keeps the lower
// predicted variance
Schedule build_schedule(const CommonOpts& opt, const NoiseConfig& noise, bool quiet) {
    if ((opt.n0 > 0) == (opt.nt > 0))
        throw ConfigError("give exactly one of --n0 or --nt");
    int K = opt.k;
    if (opt.auto_k) {
        if (opt.nt <= 0) throw ConfigError("--auto-k needs --nt");
        K = optimize_num_steps(opt.nt);
        if (!quiet) std::printf("# auto-k: K* = %d\n", K);
    }
    if (K < 0) throw ConfigError("give --k or --auto-k");

    auto make = [&](ScheduleMode m) {
        return opt.n0 > 0 ? make_schedule_n0(opt.n0, K, m, noise)
                          : make_schedule_total(opt.nt, K, m, noise);
    };
    if (opt.mode == "closed") return make(ScheduleMode::closed_form);
    if (opt.mode == "recursive") return make(ScheduleMode::recursive_numeric);
    if (opt.mode != "auto") throw ConfigError("unknown mode: " + opt.mode);
    const Schedule closed = make(ScheduleMode::closed_form);
    const Schedule recur = make(ScheduleMode::recursive_numeric);
    if (!quiet)
        std::printf("# mode auto: predicted rms closed_form=%.6g recursive_numeric=%.6g -> %s\n",
                    closed.predicted_rms(), recur.predicted_rms(),
                    recur.predicted_final_var <= closed.predicted_final_var ? "recursive_numeric"
                                                                            : "closed_form");
    return recur.predicted_final_var <= closed.predicted_final_var ? recur : closed;
}

// JSON config file: loaded before flag parsing so explicit flags override it.
void load_config_into(CommonOpts& opt, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config json: ") + e.what());
    }
    if (j.contains("n0")) opt.n0 = j["n0"].get<long long>();
    if (j.contains("nt")) opt.nt = j["nt"].get<long long>();
    if (j.contains("k")) opt.k = j["k"].get<int>();
    if (j.contains("auto_k")) opt.auto_k = j["auto_k"].get<bool>();
    if (j.contains("mode")) opt.mode = j["mode"].get<std::string>();
    if (j.contains("noise")) opt.noise = j["noise"].get<std::string>();
    if (j.contains("sampler")) opt.sampler = j["sampler"].get<std::string>();
    if (j.contains("truncate")) opt.truncate = j["truncate"].get<bool>();
    if (j.contains("fluctuating_n")) opt.fluctuating_n = j["fluctuating_n"].get<bool>();
    if (j.contains("trials")) opt.trials = j["trials"].get<int>();
    if (j.contains("seed")) opt.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("theta")) opt.theta = j["theta"].get<double>();
    if (j.contains("workers")) opt.workers = j["workers"].get<int>();
    if (j.contains("exact_cap")) opt.exact_cap_opt = j["exact_cap"].get<int>();
    if (j.contains("out_dir")) opt.out_dir = j["out_dir"].get<std::string>();
}

void print_schedule_table(const Schedule& sch) {
    std::printf("# mode=%s K=%d N_T=%lld%s\n", to_string(sch.mode), sch.K, sch.n_total,
                sch.warning.empty() ? "" : (" warning: " + sch.warning).c_str());
    std::printf("%4s %12s %14s %12s %14s\n", "k", "N_k", "s_k^2", "s_k^2*N_k", "pred_dtheta");
    for (const auto& st : sch.steps)
        std::printf("%4d %12lld %14.6g %12.6g %14.6g\n", st.k, st.n, st.s2,
                    st.s2 * double(st.n), std::sqrt(st.predicted_var));
    if (sch.repeats > 0)
        std::printf("# repeats of step %d: %lld (per-repeat var %.6g), final pred_dtheta %.6g\n",
                    sch.K, sch.repeats, sch.repeat_var, sch.predicted_rms());
}

RunManifest start_manifest(const std::string& command, int argc, char** argv,
                           const CommonOpts& opt) {
    RunManifest m;
    m.command = command;
    for (int i = 0; i < argc; ++i) m.invocation += std::string(i ? " " : "") + argv[i];
    m.master_seed = opt.seed;
    m.config = {{"n0", std::to_string(opt.n0)},
                {"nt", std::to_string(opt.nt)},
                {"k", std::to_string(opt.k)},
                {"auto_k", opt.auto_k ? "true" : "false"},
                {"mode", opt.mode},
                {"sampler", opt.sampler},
                {"noise", opt.noise},
                {"truncate", opt.truncate ? "true" : "false"},
                {"fluctuating_n", opt.fluctuating_n ? "true" : "false"},
                {"trials", std::to_string(opt.trials)},
                {"seed", std::to_string(opt.seed)},
                {"theta", std::isnan(opt.theta) ? "uniform" : std::to_string(opt.theta)},
                {"workers", std::to_string(opt.workers)},
                {"exact_cap", std::to_string(opt.exact_cap_opt)},
                {"out_dir", opt.out_dir}};
    return m;
}

void finish_manifest(RunManifest& m, const std::string& path,
                     std::chrono::steady_clock::time_point t0) {
    m.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_text_file(path, manifest_to_json(m));
}

EnsembleConfig ensemble_config(const CommonOpts& opt, const Schedule& sch,
                               const NoiseConfig& noise) {
    EnsembleConfig cfg;
    cfg.trials = opt.trials;
    cfg.schedule = sch;
    cfg.sampler = parse_sampler(opt.sampler);
    cfg.noise = noise;
    cfg.fluctuating_n = opt.fluctuating_n;
    cfg.master_seed = opt.seed;
    cfg.workers = opt.workers;
    if (!std::isnan(opt.theta)) {
        cfg.theta_mode = ThetaMode::fixed;
        cfg.theta_fixed = opt.theta;
    }
    return cfg;
}

int cmd_schedule(const CommonOpts& opt, const std::string& out_path, int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const NoiseConfig noise = parse_noise(opt.noise);
    // always show both modes side by side
    CommonOpts o = opt;
    for (const char* m : {"closed", "recursive"}) {
        o.mode = m;
        Schedule sch = build_schedule(o, noise, true);
        if (opt.truncate && noise.depolarization)
            sch = truncate_for_depolarization(sch, noise.depolarization->epsilon);
        print_schedule_table(sch);
    }
    if (!out_path.empty()) {
        Schedule chosen = build_schedule(opt, noise, true);
        if (opt.truncate && noise.depolarization)
            chosen = truncate_for_depolarization(chosen, noise.depolarization->epsilon);
        write_text_file(out_path, schedule_to_json(chosen));
        RunManifest man = start_manifest("schedule", argc, argv, opt);
        man.outputs = {out_path};
        finish_manifest(man, out_path + ".manifest.json", t0);
    }
    return 0;
}

int cmd_run(const CommonOpts& opt, int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    const NoiseConfig noise = parse_noise(opt.noise);
    Schedule sch = build_schedule(opt, noise, false);
    if (opt.truncate) {
        if (!noise.depolarization) throw ConfigError("--truncate needs --noise depol:<eps>");
        sch = truncate_for_depolarization(sch, noise.depolarization->epsilon);
    }
    const EnsembleConfig cfg = ensemble_config(opt, sch, noise);
    const EnsembleStats st = run_ensemble(cfg);

    fs::create_directories(opt.out_dir);
    const std::string stats_path = opt.out_dir + "/stats.json";
    const std::string resid_path = opt.out_dir + "/residuals.csv";
    const std::string ep_path = opt.out_dir + "/errorprob.csv";
    write_text_file(stats_path, stats_to_json(st, cfg));
    {
        std::vector<std::vector<double>> rows(st.residuals.size());
        for (std::size_t i = 0; i < st.residuals.size(); ++i)
            rows[i] = {double(i), st.thetas[i], st.estimates[i], st.residuals[i]};
        write_csv(resid_path, {"trial", "theta", "theta_est", "residual"}, rows);
    }
    {
        std::vector<std::vector<double>> rows;
        for (const auto& p : st.error_prob)
            rows.push_back({p.x, p.epsilon, p.empirical, p.predicted});
        write_csv(ep_path, {"x", "epsilon", "empirical", "predicted"}, rows);
    }
    RunManifest man = start_manifest("run", argc, argv, opt);
    man.outputs = {stats_path, resid_path, ep_path};
    finish_manifest(man, opt.out_dir + "/manifest.json", t0);

    std::printf("K=%d N_T=%lld rms=%.6g NTxDelta=%.6g bias_z=%.3f\n", sch.K, sch.n_total,
                st.rms_sensitivity, st.nt_times_delta, st.bias_z);
    return 0;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty list: " + s);
    return out;
}

int cmd_sweep(const std::string& which, const CommonOpts& opt, const std::string& list_n0,
              int kmax, const std::string& klist, const std::string& gammas,
              const std::string& epss, const std::string& nus, int argc, char** argv) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(opt.out_dir);
    RunManifest man = start_manifest("sweep " + which, argc, argv, opt);

    auto run_one = [&](const Schedule& sch, const NoiseConfig& noise,
                       std::uint64_t seed) -> EnsembleStats {
        CommonOpts o = opt;
        o.seed = seed;
        return run_ensemble(ensemble_config(o, sch, noise));
    };

    if (which == "fig2a") {
        std::vector<std::vector<double>> rows;
        for (double n0d : parse_list(list_n0)) {
            const long long n0 = (long long)n0d;
            for (int K = 0; K <= kmax; ++K) {
                CommonOpts o = opt;
                o.n0 = n0;
                o.nt = 0;
                o.k = K;
                const Schedule sch = build_schedule(o, {}, true);
                const EnsembleStats st = run_one(sch, {}, derive_seed(opt.seed, K * 1000 + n0));
                rows.push_back({double(sch.n_total), st.rms_sensitivity, st.rms_se,
                                st.nt_times_delta, double(n0), double(K), st.predicted_rms});
                std::printf("fig2a n0=%lld K=%d NTxDelta=%.4f\n", n0, K, st.nt_times_delta);
            }
        }
        const std::string path = opt.out_dir + "/fig2a.csv";
        write_csv(path, {"n_total", "rms", "rms_err", "nt_times_delta", "n0", "k", "predicted_rms"},
                  rows);
        man.outputs.push_back(path);
    } else if (which == "fig2b") {
        for (double kd : parse_list(klist)) {
            const int K = int(kd);
            CommonOpts o = opt;
            o.k = K;
            const Schedule sch = build_schedule(o, {}, true);
            const EnsembleStats st = run_one(sch, {}, derive_seed(opt.seed, K));
            std::vector<std::vector<double>> rows;
            for (const auto& p : st.error_prob)
                rows.push_back({p.x, p.epsilon, p.empirical, p.predicted, double(K),
                                double(sch.n_total)});
            char name[64];
            std::snprintf(name, sizeof name, "/fig2b_k%02d.csv", K);
            const std::string path = opt.out_dir + name;
            write_csv(path, {"x", "epsilon", "empirical", "predicted", "k", "n_total"}, rows);
            man.outputs.push_back(path);
            std::printf("fig2b K=%d written\n", K);
        }
    } else if (which == "fig3ab") {
        std::vector<std::vector<double>> rows;
        for (double gamma : parse_list(gammas)) {
            NoiseConfig noise;
            noise.dephasing = DephasingConfig{gamma};
            for (int K = 0; K <= kmax; ++K) {
                CommonOpts o = opt;
                o.k = K;
                const Schedule sch = build_schedule(o, noise, true);
                const EnsembleStats st =
                    run_one(sch, noise, derive_seed(opt.seed, K * 1000 + int(gamma * 10)));
                rows.push_back({gamma, double(K), double(sch.n_total), st.rms_sensitivity,
                                st.rms_se, st.nt_times_delta, st.predicted_rms,
                                st.predicted_rms * double(sch.n_total)});
                std::printf("fig3ab gamma=%g K=%d NTxDelta=%.4f pred=%.4f\n", gamma, K,
                            st.nt_times_delta, st.predicted_rms * double(sch.n_total));
            }
        }
        const std::string path = opt.out_dir + "/fig3ab.csv";
        write_csv(path,
                  {"gamma", "k", "n_total", "rms", "rms_err", "nt_times_delta", "predicted_rms",
                   "predicted_nt_delta"},
                  rows);
        man.outputs.push_back(path);
    } else if (which == "fig3cd") {
        std::vector<std::vector<double>> rows;
        std::vector<double> log_eps, log_beta;
        for (double eps : parse_list(epss)) {
            NoiseConfig noise;
            noise.depolarization = DepolarizationConfig{eps};
            double beta_last = 0;
            for (double nud : parse_list(nus)) {
                const long long nu = (long long)nud;
                CommonOpts o = opt;
                o.k = (o.k < 0) ? 10 : o.k;
                Schedule casc = build_schedule(o, noise, true);
                Schedule trunc = truncate_for_depolarization(casc, eps);
                // width the budget so the repeat count hits the requested nu
                long long casc_n = 0;
                for (const auto& st : trunc.steps) casc_n += st.n;
                Schedule budget = casc;
                budget.n_total = casc_n + nu * trunc.steps.back().n;
                trunc = truncate_for_depolarization(budget, eps);
                const EnsembleStats st =
                    run_one(trunc, noise, derive_seed(opt.seed, nu * 100 + int(-std::log10(eps))));
                const double beta = st.rms_sensitivity * std::sqrt(double(trunc.n_total));
                const double beta_pred = trunc.predicted_rms() * std::sqrt(double(trunc.n_total));
                rows.push_back({eps, double(trunc.K), double(trunc.steps.back().n),
                                trunc.steps.back().s2, double(nu), double(trunc.n_total),
                                st.rms_sensitivity, st.rms_se, beta, beta_pred});
                beta_last = beta;
                std::printf("fig3cd eps=%g nu=%lld beta=%.4f pred=%.4f\n", eps, nu, beta,
                            beta_pred);
            }
            log_eps.push_back(std::log(eps));
            log_beta.push_back(std::log(beta_last));
        }
        if (log_eps.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            const double n = double(log_eps.size());
            for (std::size_t i = 0; i < log_eps.size(); ++i) {
                sx += log_eps[i];
                sy += log_beta[i];
                sxx += log_eps[i] * log_eps[i];
                sxy += log_eps[i] * log_beta[i];
            }
            const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            double c_fit = 0;
            for (std::size_t i = 0; i < log_eps.size(); ++i)
                c_fit += log_beta[i] - 0.25 * log_eps[i];
            c_fit = std::exp(c_fit / n);
            std::printf("fig3cd fit: beta ~ eps^%.3f, c (at fixed 1/4) = %.3f\n", slope, c_fit);
        }
        const std::string path = opt.out_dir + "/fig3cd.csv";
        write_csv(path,
                  {"eps", "k_tilde", "n_tilde", "s2_tilde", "nu", "n_total", "rms", "rms_err",
                   "beta", "beta_pred"},
                  rows);
        man.outputs.push_back(path);
    } else {
        throw ConfigError("unknown sweep: " + which);
    }
    finish_manifest(man, opt.out_dir + "/manifest.json", t0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive quantum-phase-estimation cascade with Gaussian spin states: "
                 "classical Monte-Carlo simulator and resource optimizer"};
    app.require_subcommand(1);

    CommonOpts opt;
    if (const char* env = std::getenv("GSS_QPE_WORKERS")) opt.workers = std::atoi(env);

    auto add_common = [&](CLI::App* sub, bool with_run_opts) {
        sub->add_option("--n0", opt.n0, "particles in the zeroth step");
        sub->add_option("--nt", opt.nt, "total particle budget");
        sub->add_option("--k", opt.k, "number of squeezed steps K");
        sub->add_flag("--auto-k", opt.auto_k, "optimize K for the given --nt");
        sub->add_option("--mode", opt.mode, "schedule mode: auto|closed|recursive")
            ->default_str("auto");
        sub->add_option("--noise", opt.noise, "none | dephasing:<gamma> | depol:<eps>")
            ->default_str("none");
        sub->add_option("--config", opt.config_path, "JSON config file (flags override)");
        if (with_run_opts) {
            sub->add_option("--trials", opt.trials, "Monte-Carlo repetitions (default 10000)");
            sub->add_option("--seed", opt.seed, "master seed (default 1)");
            sub->add_option("--theta", opt.theta, "fixed phase (default: uniform random)");
            sub->add_option("--sampler", opt.sampler, "exact|gaussian|auto")->default_str("auto");
            sub->add_flag("--fluctuating-n", opt.fluctuating_n,
                          "shot-noise particle-number fluctuations");
            sub->add_flag("--truncate", opt.truncate,
                          "cut the cascade at the depolarization floor and repeat");
            sub->add_option("--workers", opt.workers,
                            "worker threads (0 = hardware, env GSS_QPE_WORKERS)");
            sub->add_option("--exact-cap", opt.exact_cap_opt,
                            "exact state-vector cap (default 4096)");
            sub->add_option("--out-dir", opt.out_dir, "output directory (default .)");
        }
    };

    CLI::App* sched = app.add_subcommand("schedule", "print / export resource schedules");
    std::string sched_out;
    add_common(sched, false);
    sched->add_flag("--truncate", opt.truncate, "apply the depolarization truncation");
    sched->add_option("--out", sched_out, "write the chosen schedule as JSON");

    CLI::App* run = app.add_subcommand("run", "run one Monte-Carlo ensemble");
    add_common(run, true);

    CLI::App* sweep = app.add_subcommand("sweep", "figure-reproduction datasets");
    std::string which, list_n0 = "100", klist = "8,10", gammas = "2,2.5,4,10",
                       epss = "1e-8,1e-6,1e-4", nus = "16,64,256";
    int kmax = 8;
    sweep->add_option("which", which, "fig2a|fig2b|fig3ab|fig3cd")->required();
    add_common(sweep, true);
    sweep->add_option("--n0-list", list_n0, "comma list of N_0 (fig2a)");
    sweep->add_option("--kmax", kmax, "largest K (fig2a, fig3ab)");
    sweep->add_option("--klist", klist, "comma list of K (fig2b)");
    sweep->add_option("--gamma", gammas, "comma list of gamma (fig3ab)");
    sweep->add_option("--eps", epss, "comma list of eps (fig3cd)");
    sweep->add_option("--nu", nus, "comma list of repeat counts (fig3cd)");

    try {
        // config file first, explicit flags override
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") load_config_into(opt, argv[i + 1]);
        app.parse(argc, argv);
        set_exact_cap(opt.exact_cap_opt);
        if (sched->parsed()) return cmd_schedule(opt, sched_out, argc, argv);
        if (run->parsed()) return cmd_run(opt, argc, argv);
        if (sweep->parsed())
            return cmd_sweep(which, opt, list_n0, kmax, klist, gammas, epss, nus, argc, argv);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    }
}
