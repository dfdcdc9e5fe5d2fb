// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stt/baselines.hpp"
#include "stt/config.hpp"

namespace stt {

const char* version_string();

/// Codebooks shared read-only across trials.
struct Codebooks {
    HierarchicalCodebook bs;
    HierarchicalCodebook ue;
};

struct MethodOutcome {
    std::string method;
    double se = 0.0;
    double ee = 0.0;
    int pilot_rounds = 0;
    std::vector<double> se_per_round;  // index = round (STT: t from 0, PM: rounds from 1 at index 0)
    CMat s;
    CMat p;
    TrainingTrace trace;
    std::optional<SensingResult> sensing;
};

struct MethodInputs {
    SystemConfig system;
    SensingConfig sensing;
    TrainingConfig training;
    int pm_rounds = 135;
    const Codebooks* codebooks = nullptr;
    bool record_rounds = false;
};

/// Runs one method on a fixed channel with its own noise stream.
MethodOutcome run_method(const std::string& method, const ChannelMatrix& channel,
                         const MethodInputs& in, std::uint64_t seed);

std::uint64_t trial_seed(std::uint64_t master, int sweep_index, int trial);
std::uint64_t method_seed(std::uint64_t trial_seed, const std::string& method);
ChannelMatrix trial_channel(const SystemConfig& cfg, std::uint64_t trial_seed);

struct MetricRow {
    std::string experiment;
    std::string sweep_variable;
    double sweep_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::optional<int> round;
    double se = 0.0;
    double ee = 0.0;
    int pilot_rounds = 0;
    std::string status = "ok";
};

std::string metrics_header();
std::string format_metric_row(const MetricRow& r);

struct RunManifest {
    std::string config_json;
    std::string version;
    std::vector<std::uint64_t> trial_seeds;  // sweep-major, trial-minor
    double wall_clock_s = 0.0;
    std::vector<std::string> outputs;
    std::vector<std::string> failed_methods;  // methods that failed in every trial

    std::string to_json() const;
};

/// Runs the spec and writes metrics, figure data and manifest under spec.output_dir.
RunManifest run_experiment(const ExperimentSpec& spec);

struct SummaryRow {
    std::string experiment;
    std::string sweep_variable;
    double sweep_value = 0.0;
    std::string method;
    std::optional<int> round;
    int n = 0;
    double se_mean = 0.0;
    double se_stderr = 0.0;
    double ee_mean = 0.0;
    double ee_stderr = 0.0;
};

/// Mean and standard error per (experiment, sweep value, method, round); failed rows skipped.
std::vector<SummaryRow> summarize(const std::vector<std::string>& csv_paths);

/// Writes summary.csv and figure_<experiment>.csv next to metrics.csv; returns written paths.
std::vector<std::string> summarize_dir(const std::string& dir);

}  // namespace stt
