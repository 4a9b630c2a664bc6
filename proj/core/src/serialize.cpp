#include "gssqpe/serialize.hpp"

#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#ifndef GSS_QPE_GIT_REV
#define GSS_QPE_GIT_REV "v0.1.0"
#endif

namespace gssqpe {

using nlohmann::json;

const char* version_string() { return GSS_QPE_GIT_REV; }

namespace {
json noise_to_json(const NoiseConfig& noise) {
    json j;
    j["dephasing_gamma"] = noise.dephasing ? json(noise.dephasing->gamma) : json();
    j["depolarization_epsilon"] =
        noise.depolarization ? json(noise.depolarization->epsilon) : json();
    return j;
}

NoiseConfig noise_from_json(const json& j) {
    NoiseConfig noise;
    if (j.contains("dephasing_gamma") && !j["dephasing_gamma"].is_null())
        noise.dephasing = DephasingConfig{j["dephasing_gamma"].get<double>()};
    if (j.contains("depolarization_epsilon") && !j["depolarization_epsilon"].is_null())
        noise.depolarization = DepolarizationConfig{j["depolarization_epsilon"].get<double>()};
    return noise;
}

ScheduleMode mode_from_string(const std::string& s) {
    if (s == "closed_form") return ScheduleMode::closed_form;
    if (s == "recursive_numeric") return ScheduleMode::recursive_numeric;
    if (s == "noise_truncated") return ScheduleMode::noise_truncated;
    throw ConfigError("unknown schedule mode: " + s);
}
}  // namespace

std::string schedule_to_json(const Schedule& schedule, int indent) {
    json j;
    j["schema"] = "gss-qpe/schedule/1";
    j["mode"] = to_string(schedule.mode);
    j["K"] = schedule.K;
    j["n_total"] = schedule.n_total;
    j["noise"] = noise_to_json(schedule.noise);
    j["repeats"] = schedule.repeats;
    j["repeat_var"] = schedule.repeat_var;
    j["predicted_final_var"] = schedule.predicted_final_var;
    if (!schedule.warning.empty()) j["warning"] = schedule.warning;
    json steps = json::array();
    for (const auto& st : schedule.steps) {
        steps.push_back({{"k", st.k},
                         {"n", st.n},
                         {"s2", st.s2},
                         {"predicted_var", st.predicted_var},
                         {"predicted_var_lo", st.predicted_var_lo}});
    }
    j["steps"] = steps;
    return j.dump(indent) + "\n";
}

Schedule schedule_from_json(const std::string& text) {
    const json j = json::parse(text);
    Schedule s;
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.K = j.at("K").get<int>();
    s.n_total = j.at("n_total").get<long long>();
    s.noise = noise_from_json(j.value("noise", json::object()));
    s.repeats = j.value("repeats", 0LL);
    s.repeat_var = j.value("repeat_var", 0.0);
    s.predicted_final_var = j.value("predicted_final_var", 0.0);
    s.warning = j.value("warning", "");
    for (const auto& st : j.at("steps")) {
        s.steps.push_back({st.at("k").get<int>(), st.at("n").get<long long>(),
                           st.at("s2").get<double>(), st.value("predicted_var", 0.0),
                           st.value("predicted_var_lo", 0.0)});
    }
    return s;
}

std::string stats_to_json(const EnsembleStats& stats, const EnsembleConfig& cfg, int indent) {
    json j;
    j["schema"] = "gss-qpe/stats/1";
    j["config"] = {{"trials", cfg.trials},
                   {"theta_mode", cfg.theta_mode == ThetaMode::uniform ? "uniform" : "fixed"},
                   {"theta_fixed", cfg.theta_fixed},
                   {"sampler", to_string(cfg.sampler)},
                   {"fluctuating_n", cfg.fluctuating_n},
                   {"master_seed", cfg.master_seed},
                   {"noise", noise_to_json(cfg.noise)},
                   {"schedule_mode", to_string(cfg.schedule.mode)},
                   {"K", cfg.schedule.K},
                   {"n_total", cfg.schedule.n_total}};
    j["trials"] = stats.trials;
    j["n_total"] = stats.n_total;
    j["rms"] = stats.rms_sensitivity;
    j["rms_se"] = stats.rms_se;
    j["bias"] = stats.bias;
    j["bias_z"] = stats.bias_z;
    j["nt_times_delta"] = stats.nt_times_delta;
    j["predicted_rms"] = stats.predicted_rms;
    j["ks_distance"] = stats.gaussianity.ks_distance;
    j["histogram"] = {{"edges", stats.histogram.edges}, {"counts", stats.histogram.counts}};
    json ep = json::array();
    for (const auto& p : stats.error_prob)
        ep.push_back({{"x", p.x},
                      {"epsilon", p.epsilon},
                      {"empirical", p.empirical},
                      {"predicted", p.predicted}});
    j["error_prob"] = ep;
    return j.dump(indent) + "\n";
}

std::string manifest_to_json(const RunManifest& m, int indent) {
    json j;
    j["schema"] = "gss-qpe/manifest/1";
    j["version"] = version_string();
    j["command"] = m.command;
    j["invocation"] = m.invocation;
    j["config"] = m.config;
    j["master_seed"] = m.master_seed;
    j["duration_seconds"] = m.duration_seconds;
    j["outputs"] = m.outputs;
    j["csv_schemas"] = {{"residuals", "trial,theta,theta_est,residual"},
                        {"errorprob", "x,epsilon,empirical,predicted"}};
    return j.dump(indent) + "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    char buf[40];
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out << buf << (i + 1 < row.size() ? "," : "");
        }
        out << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << text;
}

}  // namespace gssqpe
