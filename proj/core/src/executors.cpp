#include "tvmdp/executors.hpp"

#include <chrono>

namespace tvmdp {

namespace {

class Stopwatch {
  public:
    explicit Stopwatch(double& sink)
        : sink_(sink), start_(std::chrono::steady_clock::now()) {}
    ~Stopwatch() {
        sink_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    double& sink_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

MdpPolicySource::MdpPolicySource(const GridWorld& grid, const TimeVaryingField& field,
                                 RewardModel reward, NoiseConfig noise, ViOptions options)
    : grid_(grid), field_(field), reward_(reward), noise_(noise), options_(options) {}

void MdpPolicySource::plan(State, double t) {
    if (solved_) return;
    Stopwatch timer(compute_seconds_);
    const std::vector<double> query(static_cast<std::size_t>(grid_.num_cells()), t);
    solution_ = mdp_value_iteration(grid_, build_pmf_table(grid_, field_, noise_, query), reward_,
                                    options_);
    solved_ = true;
    ++plan_count_;
}

const std::vector<int>& MdpPolicySource::action_set(State s, double) const {
    return solution_.policy.at(s);
}

TvmdpPolicySource::TvmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field,
                                     RewardModel reward, NoiseConfig noise, TvmdpOptions options,
                                     int replan_every)
    : grid_(grid),
      field_(field),
      reward_(reward),
      noise_(noise),
      options_(options),
      replan_every_(replan_every) {}

void TvmdpPolicySource::plan(State s, double t) {
    Stopwatch timer(compute_seconds_);
    const double before = solution_.stats.linear_solve_seconds;
    TvmdpSolution fresh = tvmdp_solve(grid_, field_, reward_, noise_, s, t, options_, &warm_starts_);
    fresh.stats.linear_solve_seconds += before;  // accumulate across replans
    linear_solve_seconds_ = fresh.stats.linear_solve_seconds;
    solution_ = std::move(fresh);
    ++plan_count_;
}

const std::vector<int>& TvmdpPolicySource::action_set(State s, double) const {
    return solution_.policy.at(s);
}

DtmdpPolicySource::DtmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field,
                                     RewardModel reward, NoiseConfig noise, DtmdpOptions options)
    : grid_(grid), field_(field), reward_(reward), noise_(noise), options_(std::move(options)) {}

void DtmdpPolicySource::plan(State, double t) {
    if (solved_) return;
    Stopwatch timer(compute_seconds_);
    solution_ = dtmdp_solve(grid_, field_, reward_, noise_, t, options_);
    solved_ = true;
    ++plan_count_;
}

const std::vector<int>& DtmdpPolicySource::action_set(State s, double t) const {
    return solution_.action_set_at(s, t);
}

AtmdpPolicySource::AtmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field,
                                     RewardModel reward, NoiseConfig noise, AtmdpOptions options,
                                     int replan_every)
    : grid_(grid),
      field_(field),
      reward_(reward),
      noise_(noise),
      options_(options),
      replan_every_(replan_every) {}

void AtmdpPolicySource::plan(State s, double t) {
    Stopwatch timer(compute_seconds_);
    solution_ = atmdp_solve(grid_, field_, reward_, noise_, s, t, options_);
    ++plan_count_;
}

const std::vector<int>& AtmdpPolicySource::action_set(State s, double) const {
    return solution_.policy.at(s);
}

}  // namespace tvmdp
