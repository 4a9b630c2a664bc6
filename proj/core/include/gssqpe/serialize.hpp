#pragma once

#include <map>
#include <string>
#include <vector>

#include "gssqpe/stats.hpp"

namespace gssqpe {

// Version string baked at configure time (git describe when available).
const char* version_string();

// JSON (keys sorted, shortest-roundtrip doubles: byte-stable for fixed inputs).
std::string schedule_to_json(const Schedule& schedule, int indent = 2);
Schedule schedule_from_json(const std::string& text);

// Statistical outputs only: excludes wall-clock and worker count on purpose so
// that reruns with the same seed are byte-identical.
std::string stats_to_json(const EnsembleStats& stats, const EnsembleConfig& cfg, int indent = 2);

struct RunManifest {
    std::string command;               // e.g. "run"
    std::string invocation;            // argv joined
    std::map<std::string, std::string> config;  // resolved settings, all defaults materialized
    std::uint64_t master_seed = 0;
    double duration_seconds = 0;
    std::vector<std::string> outputs;  // paths written by the run
};

std::string manifest_to_json(const RunManifest& manifest, int indent = 2);

// CSV with a header row, full-precision floats, newline-terminated.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace gssqpe
