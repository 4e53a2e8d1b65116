#pragma once

#include "tvmdp/disturbance.hpp"
#include "tvmdp/grid_world.hpp"
#include "tvmdp/transition.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace tvmdp {

/// Sentinel travel time (seconds) assigned to states the current policy
/// cannot reach, instead of +inf, so value backups still evaluate them.
inline constexpr double kUnreachableTime = 1e6;

struct TimingConfig {
    /// Floor (meters per duration) on the conditional forward displacement
    /// below which a hop counts as unreachable.
    double epsilon_velocity = 1e-6;
    /// Relative residual target for the Kolmogorov linear systems.
    double linear_tol = 1e-8;
    /// Iteration cap = factor * |S|.
    int iteration_cap_factor = 10;
    /// Dwell time (seconds) of the idle self-hop; defaults to one nominal hop
    /// (cell_size / speed) when unset.
    std::optional<double> idle_dwell;

    double resolved_idle_dwell(const GridWorld& grid) const {
        return idle_dwell.value_or(grid.cell_size() / grid.speed());
    }
};

/// Expected travel time (seconds) from s to a one-hop neighbor succ != s.
///
/// Picks the admissible action whose resultant (commanded velocity plus
/// disturbance at x(s), t) has the smallest angle to x(succ) - x(s), rotates
/// coordinates so the resultant lies on the first basis, and estimates the
/// forward velocity as the transformed Gaussian's conditional mean
/// E(x1 | x2 = 0) over the duration. Returns +inf when no action makes
/// forward progress (or the conditional mean falls below epsilon_velocity).
double one_hop_time(const GridWorld& grid, State s, State succ, const TimeVaryingField& field,
                    double t, const NoiseConfig& noise, const TimingConfig& cfg = {});

/// One-hop times for every state, aligned with grid.neighbors(s); the idle
/// entry carries the configured dwell time. query_times holds the absolute
/// field time per source state.
struct OneHopTable {
    std::vector<std::vector<double>> times;  // [s][neighbor index], seconds

    double at(const GridWorld& grid, State s, State succ) const;
};

OneHopTable build_one_hop_table(const GridWorld& grid, const TimeVaryingField& field,
                                std::span<const double> query_times, const NoiseConfig& noise,
                                const TimingConfig& cfg = {});

/// First-step-analysis linear system for the expected first-passage times
/// into end_state: row i reads t_i - sum_j P_i(j) t_j = sum_j P_i(j) tau_ij,
/// with the end state (and any unreachable/blocked cell) fixed to an identity
/// row. Variables are ordered by state id.
struct KolmogorovSystem {
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd rhs;
    State end_state = 0;
};

/// Assemble the system from the per-state policy PMFs (mixture of the optimal
/// actions) and the one-hop times. Throws std::invalid_argument if a PMF is
/// missing for a non-blocked state.
KolmogorovSystem assemble_system(const GridWorld& grid, State end_state,
                                 std::span<const TransitionPmf> policy_pmfs,
                                 const OneHopTable& one_hop, const TimingConfig& cfg = {});

struct SolveStats {
    double linear_solve_seconds = 0.0;
    long systems_solved = 0;
    long krylov_iterations = 0;
    long negative_clamps = 0;

    void merge(const SolveStats& other) {
        linear_solve_seconds += other.linear_solve_seconds;
        systems_solved += other.systems_solved;
        krylov_iterations += other.krylov_iterations;
        negative_clamps += other.negative_clamps;
    }
};

struct LinearSolveResult {
    Eigen::VectorXd x;
    double relative_residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// BiCGSTAB with diagonal preconditioning. Negative solution entries below
/// -tol are clamped to zero and counted in stats; entries in (-tol, 0) are
/// clamped silently.
LinearSolveResult solve_system(const KolmogorovSystem& system, double tol, int max_iterations,
                               SolveStats* stats = nullptr,
                               const Eigen::VectorXd* warm_start = nullptr);

/// Expected travel times from s0 to every state under the given policy PMFs:
/// 0 at s0, the one-hop estimate for direct successors, and the s0 component
/// of the per-end-state Kolmogorov solution elsewhere (clamped to
/// kUnreachableTime). warm_starts, when provided, caches solutions per end
/// state across calls. Throws std::runtime_error with the end state and
/// residual if a system fails to converge.
std::vector<double> multi_hop_times(const GridWorld& grid, State s0,
                                    std::span<const TransitionPmf> policy_pmfs,
                                    const OneHopTable& one_hop, const TimingConfig& cfg = {},
                                    SolveStats* stats = nullptr,
                                    std::unordered_map<State, Eigen::VectorXd>* warm_starts = nullptr);

/// One-hop and multi-hop estimates frozen at a solve, anchored at s0.
struct TransitionTimeTable {
    State anchor = 0;
    OneHopTable one_hop;
    std::vector<double> multi_hop;
};

}  // namespace tvmdp
