#pragma once

#include "tvmdp/disturbance.hpp"
#include "tvmdp/grid_world.hpp"
#include "tvmdp/timing.hpp"
#include "tvmdp/transition.hpp"

#include <span>
#include <vector>

namespace tvmdp {

/// Goal-seeking reward structure: the goal is absorbing with its value pinned
/// at goal_reward, every transition earns step_cost, and future reward is
/// discounted by `discount` per hop.
struct RewardModel {
    double goal_reward = 100.0;
    double step_cost = 0.0;
    double discount = 0.95;

    void validate() const;
};

struct ValueFunction {
    std::vector<double> values;  // by state id; blocked cells stay 0
    int epoch = 0;

    double at(State s) const { return values[static_cast<std::size_t>(s)]; }
};

/// Optimal-action sets per state (ties kept; ids sorted ascending).
/// Blocked cells carry an empty set; the goal pins to {idle}.
struct Policy {
    std::vector<std::vector<int>> action_sets;

    const std::vector<int>& at(State s) const { return action_sets[static_cast<std::size_t>(s)]; }
};

/// Per-(state, admissible action) transition PMFs, aligned with
/// grid.neighbors(s): per_state[s][k] belongs to neighbors(s)[k].action.
struct PmfTable {
    std::vector<std::vector<TransitionPmf>> per_state;
};

/// PMFs for every state with the field queried at that state's absolute time.
PmfTable build_pmf_table(const GridWorld& grid, const TimeVaryingField& field,
                         const NoiseConfig& noise, std::span<const double> query_times);

/// Pure-action PMFs (T_a): disturbance-free means, action covariance only.
PmfTable build_action_only_pmf_table(const GridWorld& grid, const NoiseConfig& noise);

/// Equal-weight mixture of each state's optimal-action PMFs from the table.
std::vector<TransitionPmf> policy_mixture(const GridWorld& grid, const PmfTable& table,
                                          const Policy& policy);

struct ViOptions {
    double tol = 1e-6;
    int max_iter = 100000;
    /// Q-values within tie_tol of the maximum join the optimal set.
    double tie_tol = 1e-9;
};

struct MdpSolution {
    ValueFunction value;
    Policy policy;
    int iterations = 0;
    double final_change = 0.0;
};

/// Standard value iteration (Jacobi sweeps) over static PMFs, run until the
/// sup-norm value change drops to tol.
MdpSolution mdp_value_iteration(const GridWorld& grid, const PmfTable& pmfs,
                                const RewardModel& reward, const ViOptions& options = {});

/// One Jacobi Bellman sweep; returns the sup-norm change. The goal stays
/// pinned at goal_reward and blocked cells at zero.
double bellman_sweep(const GridWorld& grid, const PmfTable& pmfs, const RewardModel& reward,
                     const std::vector<double>& value, std::vector<double>& next_value);

/// Argmax action sets of the one-step lookahead under `value`.
Policy extract_policy(const GridWorld& grid, const PmfTable& pmfs, const RewardModel& reward,
                      const std::vector<double>& value, double tie_tol);

struct TvmdpOptions {
    /// Sup-norm value-change stopping threshold of the alternating scheme.
    double tol = 1e-6;
    int max_iter = 2000;
    /// Secondary stop condition: max relative change of the multi-hop times.
    double time_rel_tol = 0.01;
    double tie_tol = 1e-9;
    /// Use the synergistic T_ad in the Kolmogorov systems (default); false
    /// switches to the pure-action T_a.
    bool kolmogorov_synergistic = true;
    TimingConfig timing;
};

struct TvmdpSolution {
    ValueFunction value;
    Policy policy;
    TransitionTimeTable times;
    int iterations = 0;
    double final_value_change = 0.0;
    double final_time_change = 0.0;
    SolveStats stats;
};

/// Alternating spatial/temporal value iteration anchored at the agent's state
/// s0 and wall-clock time t0.
///
/// Each iteration runs one Bellman sweep with the transition model of state s
/// evaluated at t0 + t(s0, s) (all times start at zero, so iteration 1 is a
/// plain static sweep), re-estimates one-hop times per state/neighbor, and
/// re-solves the per-end-state Kolmogorov systems for the multi-hop times
/// under the fresh optimal-action mixtures. Stops once the value change is
/// at most tol and the multi-hop times moved by at most time_rel_tol
/// relative. warm_starts optionally carries Krylov initial guesses across
/// calls (receding-horizon replans); it never changes converged results.
TvmdpSolution tvmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, State s0, double t0,
                          const TvmdpOptions& options = {},
                          std::unordered_map<State, Eigen::VectorXd>* warm_starts = nullptr);

struct DtmdpOptions {
    int layers = 10;
    /// Planning horizon covered by the layers (seconds). Defaults to
    /// layers * one nominal hop when unset (<= 0).
    double horizon = 0.0;
    double tol = 1e-6;
    int max_iter = 100000;
    double tie_tol = 1e-9;
    /// Guard on |cells| * layers.
    std::size_t state_cap = 2'000'000;
    TimingConfig timing;
};

/// Time-layered MDP baseline: duplicates the state space into `layers` time
/// slices Delta = horizon / layers apart, advances layers by the rounded
/// one-hop time (at least one layer per non-idle hop, never backwards), holds
/// the last layer absorbing in time, and runs value iteration to tol.
class DtmdpSolution {
  public:
    int layers = 0;
    double layer_dt = 0.0;
    double t0 = 0.0;
    int cells = 0;
    std::vector<double> values;                  // [layer * cells + s]
    std::vector<std::vector<int>> action_sets;   // same indexing
    int iterations = 0;

    std::size_t state_count() const {
        return static_cast<std::size_t>(layers) * static_cast<std::size_t>(cells);
    }
    int layer_at(double t) const;
    const std::vector<int>& action_set_at(State s, double t) const;
    /// Argmax sets of one layer as a spatial policy.
    Policy layer_policy(int layer) const;
};

DtmdpSolution dtmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, double t0,
                          const DtmdpOptions& options = {});

struct AtmdpOptions {
    double tol = 1e-6;
    double tie_tol = 1e-9;
    /// Hard cap on priority-queue backups, as a multiple of |cells|.
    long max_backup_factor = 2000;
    TimingConfig timing;
};

struct AtmdpSolution {
    ValueFunction value;
    Policy policy;
    /// Greedy forward-accumulated lookahead time per state (from s0).
    std::vector<double> lookahead_times;
    long backups = 0;
};

/// Prioritized-sweeping approximation: look-ahead times come from one greedy
/// pass accumulating one-hop times outward from s0 (no linear systems), then
/// value changes propagate by priority |dV| until every Bellman residual is
/// at most tol.
AtmdpSolution atmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, State s0, double t0,
                          const AtmdpOptions& options = {});

}  // namespace tvmdp
