#include "tvmdp/sim.hpp"

#include "tvmdp/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

namespace tvmdp {

std::string to_string(Outcome outcome) {
    return outcome == Outcome::reached_goal ? "reached_goal" : "timeout";
}

int default_timeout_steps(const GridWorld& grid) { return 50 * grid.num_states(); }

RolloutResult rollout(PolicySource& policy, const GridWorld& grid, const TimeVaryingField& field,
                      const NoiseConfig& noise, State s0, double t0, std::uint64_t seed,
                      int timeout_steps) {
    if (!grid.valid_id(s0) || grid.blocked(s0))
        throw std::invalid_argument("rollout: invalid start state");
    if (timeout_steps <= 0) timeout_steps = default_timeout_steps(grid);

    CounterRng rng(seed);
    RolloutResult result;
    auto& samples = result.trajectory.samples;
    samples.reserve(64);

    const double before_compute = policy.compute_seconds();
    const double before_linear = policy.linear_solve_seconds();
    policy.plan(s0, t0);

    Eigen::Vector2d position = grid.state_center(s0);
    State state = s0;
    double t = t0;
    const int interval = policy.replan_interval();

    int step = 0;
    result.trajectory.outcome = Outcome::timeout;
    while (true) {
        if (state == grid.goal()) {
            result.trajectory.outcome = Outcome::reached_goal;
            samples.push_back({t, position, state, -1});
            break;
        }
        if (step >= timeout_steps) {
            samples.push_back({t, position, state, -1});
            break;
        }
        if (step > 0 && interval > 0 && step % interval == 0) {
            policy.plan(state, t);
            ++result.metrics.replan_count;
        }

        const auto& set = policy.action_set(state, t);
        if (set.empty()) throw std::runtime_error("rollout: empty action set");
        const int action_id =
            set.size() == 1 ? set[0] : set[rng.next_below(set.size())];
        samples.push_back({t, position, state, action_id});

        const GaussianMotion motion =
            motion_model(grid, state, grid.actions()[action_id], field, t, noise);
        const Eigen::Matrix2d chol = motion.covariance.llt().matrixL();
        const Eigen::Vector2d displacement = rng.next_gaussian2(motion.mean, chol);

        const Eigen::Vector2d next_position = grid.clamp_to_bounds(position + displacement);
        result.metrics.path_length += (next_position - position).norm();
        position = next_position;
        t += noise.duration;
        state = grid.locate(position);
        ++step;
    }

    result.metrics.steps = step;
    result.metrics.travel_time = t - t0;
    result.metrics.outcome = result.trajectory.outcome;
    result.metrics.compute_seconds = policy.compute_seconds() - before_compute;
    result.metrics.linear_solve_seconds = policy.linear_solve_seconds() - before_linear;
    return result;
}

namespace {

Stat stat_of(std::span<const double> xs) {
    Stat s;
    s.min = xs[0];
    s.max = xs[0];
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

MetricsSummary aggregate(std::span<const RunMetrics> runs) {
    if (runs.empty()) throw std::invalid_argument("aggregate: empty run list");
    MetricsSummary summary;
    summary.runs = static_cast<int>(runs.size());
    std::vector<double> lengths, times, steps, replans, compute, linear;
    for (const auto& r : runs) {
        lengths.push_back(r.path_length);
        times.push_back(r.travel_time);
        steps.push_back(r.steps);
        replans.push_back(r.replan_count);
        compute.push_back(r.compute_seconds);
        linear.push_back(r.linear_solve_seconds);
        if (r.outcome == Outcome::reached_goal) ++summary.reached_goal;
    }
    summary.path_length = stat_of(lengths);
    summary.travel_time = stat_of(times);
    summary.steps = stat_of(steps);
    summary.replans = stat_of(replans);
    summary.compute_seconds = stat_of(compute);
    summary.linear_solve_seconds = stat_of(linear);
    return summary;
}

}  // namespace tvmdp
