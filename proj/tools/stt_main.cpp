// SPDX-License-Identifier: Apache-2.0
//
// stt: run near-field beam-training experiments and summarize their output.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "stt/experiment.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sense-then-train near-field beam training simulator"};
    app.set_version_flag("--version", std::string(stt::version_string()));
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    std::string config_path;
    std::optional<std::string> experiment;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    run->add_option("--config", config_path, "Config file")->required();
    run->add_option("--experiment", experiment, "Override the experiment id");
    run->add_option("--seed", seed, "Override the master seed");
    run->add_option("--trials", trials, "Override the number of Monte Carlo trials");
    run->add_option("--out", out_dir, "Override the output directory");
    run->add_option("--threads", threads, "Worker threads (0 = all cores)");

    auto* summ = app.add_subcommand("summarize", "Aggregate metrics.csv in a run directory");
    std::string in_dir;
    summ->add_option("--in", in_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*run) {
        stt::ExperimentSpec spec;
        try {
            spec = stt::load_config(config_path);
            if (experiment) spec.experiment = *experiment;
            if (seed) spec.seed = *seed;
            if (trials) spec.n_trials = *trials;
            if (out_dir) spec.output_dir = *out_dir;
            if (threads) spec.threads = *threads;
            spec.validate();
        } catch (const stt::ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        try {
            const stt::RunManifest m = stt::run_experiment(spec);
            std::cout << "wrote " << m.outputs.size() << " files to " << spec.output_dir << " in "
                      << m.wall_clock_s << " s\n";
            if (!m.failed_methods.empty()) {
                std::cerr << "methods failed in every trial:";
                for (const auto& f : m.failed_methods) std::cerr << ' ' << f;
                std::cerr << '\n';
                return kExitRuntime;
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitRuntime;
        }
        return 0;
    }

    try {
        for (const auto& f : stt::summarize_dir(in_dir)) std::cout << f << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
