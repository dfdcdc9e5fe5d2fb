// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stt/geometry_channel.hpp"
#include "stt/sensing.hpp"
#include "stt/training.hpp"

namespace stt {

/// Invalid or unknown configuration; the message names the offending key path.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = {
        "wavenumber_map", "singular_spectrum", "se_vs_distance", "se_vs_rounds",
        "beam_maps",      "se_vs_power",       "se_vs_streams",  "ee_vs_streams"};
    return ids;
}

inline const std::vector<std::string>& method_ids() {
    static const std::vector<std::string> ids = {"hybrid_stt", "fd_stt", "fd_opt", "fd_pm", "ffc"};
    return ids;
}

inline const std::vector<std::string>& sweep_variables() {
    static const std::vector<std::string> ids = {"none",           "link_distance_m", "tx_power_dbm",
                                                 "n_streams",      "training_rounds", "tolerance"};
    return ids;
}

struct MapGrid {
    double x_half_width = 2.0;  // meters around the array axis
    double z_min = 5.0;
    double z_max = 25.0;
    int nx = 61;
    int nz = 81;
};

struct ExperimentSpec {
    std::string experiment = "se_vs_distance";
    std::string sweep_variable = "none";
    std::vector<double> sweep_values = {0.0};
    int n_trials = 1;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    SystemConfig system;
    SensingConfig sensing;
    TrainingConfig training;
    std::vector<std::string> methods = method_ids();
    std::optional<int> pm_rounds;       // default T_s + T_a
    std::optional<int> codebook_depth;  // default ceil(log2 N)
    MapGrid map;
    std::string output_dir = "results";

    void validate() const;
    /// Applies one sweep value to a copy of the spec.
    ExperimentSpec at_sweep(double value) const;
    int effective_pm_rounds() const { return pm_rounds.value_or(sensing.rounds + training.rounds); }
};

ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::string& path);
/// Fully resolved configuration as JSON text.
std::string spec_to_json(const ExperimentSpec& spec, int indent = 2);

}  // namespace stt
