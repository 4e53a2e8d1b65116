#pragma once

#include "tvmdp/executors.hpp"
#include "tvmdp/grid_world.hpp"
#include "tvmdp/transition.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tvmdp {

enum class Outcome { reached_goal, timeout };

std::string to_string(Outcome outcome);

struct TrajectorySample {
    double t = 0.0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();
    State state = 0;
    /// Action commanded at this sample; -1 on the terminal sample.
    int action = -1;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    Outcome outcome = Outcome::timeout;
};

struct RunMetrics {
    double path_length = 0.0;       // meters actually traveled (post-clamp)
    double travel_time = 0.0;       // seconds of simulated motion
    double compute_seconds = 0.0;   // wall clock spent inside solver calls
    double linear_solve_seconds = 0.0;
    int steps = 0;
    int replan_count = 0;
    Outcome outcome = Outcome::timeout;
};

struct RolloutResult {
    Trajectory trajectory;
    RunMetrics metrics;
};

/// Execute a policy from s0/t0 under the field with Gaussian motion noise.
///
/// Per hop: query the policy at the current (state, time), sample one
/// displacement from the motion model of the chosen action over one duration,
/// clamp to the arena, advance time, and re-locate the state. Ties in the
/// optimal set are sampled uniformly; everything is deterministic given the
/// seed. Terminates on goal entry (locate == goal) or after timeout_steps.
RolloutResult rollout(PolicySource& policy, const GridWorld& grid, const TimeVaryingField& field,
                      const NoiseConfig& noise, State s0, double t0, std::uint64_t seed,
                      int timeout_steps);

/// Default hop budget: 50 * |S|.
int default_timeout_steps(const GridWorld& grid);

struct Stat {
    double mean = 0.0;
    double stddev = 0.0;  // sample stddev; 0 for a single run
    double min = 0.0;
    double max = 0.0;
};

struct MetricsSummary {
    int runs = 0;
    int reached_goal = 0;
    Stat path_length;
    Stat travel_time;
    Stat steps;
    Stat replans;
    Stat compute_seconds;
    Stat linear_solve_seconds;
};

/// Exact sample statistics over a non-empty batch of runs.
MetricsSummary aggregate(std::span<const RunMetrics> runs);

}  // namespace tvmdp
