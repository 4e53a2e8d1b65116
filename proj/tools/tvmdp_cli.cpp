// Command-line front end: runs solver x seed experiment matrices, validates
// configs, and emits plot-ready policy-map data from completed runs.
//
// Exit codes: 0 all cells completed (timeouts count as completed),
// 1 solver/runtime failure, 2 config schema violation.

#include "tvmdp/config.hpp"
#include "tvmdp/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir, int jobs,
            std::uint64_t seed_offset) {
    tvmdp::ExperimentConfig config;
    try {
        config = tvmdp::load_config(config_path);
    } catch (const tvmdp::FormatError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }

    tvmdp::RunOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    options.jobs = jobs;
    options.seed_offset = seed_offset;

    tvmdp::ExperimentResult result;
    try {
        result = tvmdp::run_experiment(config, options);
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << "\n";
        return kExitFailure;
    }

    int completed = 0;
    for (const auto& cell : result.cells) {
        if (cell.failed) {
            std::cerr << "cell " << cell.solver << " seed " << cell.seed
                      << " failed: " << cell.error << "\n";
        } else {
            ++completed;
        }
    }
    std::cout << completed << "/" << result.cells.size() << " cells completed; outputs in "
              << result.out_dir.string() << "\n";
    return result.all_completed ? kExitOk : kExitFailure;
}

int cmd_validate(const std::string& config_path) {
    try {
        tvmdp::load_config(config_path);
    } catch (const tvmdp::FormatError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    }
    std::cout << config_path << ": OK\n";
    return kExitOk;
}

int cmd_emit_policy_map(const std::string& run_dir, const std::string& solver, int horizon) {
    try {
        const auto file = tvmdp::emit_policy_map(run_dir, solver, horizon);
        std::cout << file.string() << "\n";
    } catch (const tvmdp::FormatError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-varying MDP planning experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    std::uint64_t seed_offset = 0;
    auto* run = app.add_subcommand("run", "Execute a solver x seed experiment matrix");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides $TVMDP_OUT_DIR and the config)");
    run->add_option("--jobs", jobs, "Worker threads for matrix cells")->check(CLI::PositiveNumber);
    run->add_option("--seed-offset", seed_offset, "Added to every configured seed");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Schema-check a config file");
    validate->add_option("config", validate_path, "Experiment config (JSON)")->required();

    std::string run_dir;
    std::string solver;
    int horizon = 0;
    auto* emit = app.add_subcommand("emit-policy-map",
                                    "Re-solve a completed run and write per-state policy-map data");
    emit->add_option("run_dir", run_dir, "Directory written by `run`")->required();
    emit->add_option("--solver", solver, "Solver label (default: first in the config)");
    emit->add_option("--horizon-steps", horizon, "Occupation propagation steps");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path, out_dir, jobs, seed_offset);
    if (validate->parsed()) return cmd_validate(validate_path);
    if (emit->parsed()) return cmd_emit_policy_map(run_dir, solver, horizon);
    return kExitFailure;
}
