#pragma once

#include "tvmdp/config.hpp"
#include "tvmdp/sim.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tvmdp {

struct RunOptions {
    /// Output directory priority: this override, then $TVMDP_OUT_DIR, then
    /// the config's output_dir.
    std::optional<std::string> out_dir;
    int jobs = 1;
    std::uint64_t seed_offset = 0;
};

struct CellResult {
    std::string solver;
    std::uint64_t seed = 0;
    RunMetrics metrics;
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::filesystem::path out_dir;
    std::vector<CellResult> cells;
    bool all_completed = true;  // timeouts count as completed; failures do not
};

/// Execute every (solver, seed + seed_offset) cell of the experiment matrix.
///
/// Writes, under the resolved output directory: the resolved config
/// (config.json), one trajectory CSV (traj_<solver>_s<seed>.csv) and one
/// metrics JSON (metrics_<solver>_s<seed>.json) per cell, a summary.json and
/// a comparison.csv. Cells run in a worker pool of `jobs` threads; all files
/// are written by the calling thread afterwards. Reruns with an identical
/// config produce byte-identical outputs except for the wall-clock fields
/// under each "timing" object.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Resolve the effective output directory without running anything.
std::filesystem::path resolve_out_dir(const ExperimentConfig& config, const RunOptions& options);

/// Per-state policy map of a solved instance:
///   state,x,y,action_ids,multi_hop_time,visit_likelihood
/// action_ids joins the optimal set with ';'; visit_likelihood is the
/// occupation frequency of the goal-absorbing policy chain propagated
/// forward from the start for horizon_steps.
struct PolicyMapRow {
    State state = 0;
    double x = 0.0;
    double y = 0.0;
    std::vector<int> action_ids;
    double multi_hop_time = 0.0;
    double visit_likelihood = 0.0;
};

std::vector<PolicyMapRow> build_policy_map(const ExperimentConfig& config,
                                           const SolverSpec& solver, int horizon_steps = 0);

/// Re-solve the labeled solver of a completed run directory (reads its
/// config.json) and write policy_map_<label>.csv there. Returns the file path.
std::filesystem::path emit_policy_map(const std::filesystem::path& run_dir,
                                      const std::string& solver_label = "",
                                      int horizon_steps = 0);

void write_policy_map_csv(const std::filesystem::path& file, std::span<const PolicyMapRow> rows);

}  // namespace tvmdp
