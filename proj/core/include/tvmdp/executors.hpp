#pragma once

#include "tvmdp/solvers.hpp"

#include <memory>

namespace tvmdp {

/// Planner handle the simulator executes: plan() (re)solves from the given
/// state and wall-clock time, action_set() reads the current policy. Plan
/// wall-clock and linear-system time accumulate across replans.
class PolicySource {
  public:
    virtual ~PolicySource() = default;

    virtual void plan(State s, double t) = 0;
    virtual const std::vector<int>& action_set(State s, double t) const = 0;

    /// Replan cadence in hops; 0 plans once at episode start.
    virtual int replan_interval() const { return 0; }

    double compute_seconds() const { return compute_seconds_; }
    double linear_solve_seconds() const { return linear_solve_seconds_; }
    int plan_count() const { return plan_count_; }

  protected:
    double compute_seconds_ = 0.0;
    double linear_solve_seconds_ = 0.0;
    int plan_count_ = 0;
};

/// Static baseline: one value-iteration solve with the field frozen at the
/// episode start time.
class MdpPolicySource final : public PolicySource {
  public:
    MdpPolicySource(const GridWorld& grid, const TimeVaryingField& field, RewardModel reward,
                    NoiseConfig noise, ViOptions options = {});

    void plan(State s, double t) override;
    const std::vector<int>& action_set(State s, double t) const override;
    const MdpSolution& solution() const { return solution_; }

  private:
    const GridWorld& grid_;
    const TimeVaryingField& field_;
    RewardModel reward_;
    NoiseConfig noise_;
    ViOptions options_;
    MdpSolution solution_;
    bool solved_ = false;
};

/// Receding-horizon TVMDP execution: re-solves from the robot's state and
/// wall-clock time every `replan_interval` hops; Krylov warm starts persist
/// across replans.
class TvmdpPolicySource final : public PolicySource {
  public:
    TvmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field, RewardModel reward,
                      NoiseConfig noise, TvmdpOptions options = {}, int replan_every = 1);

    void plan(State s, double t) override;
    const std::vector<int>& action_set(State s, double t) const override;
    int replan_interval() const override { return replan_every_; }
    const TvmdpSolution& solution() const { return solution_; }

  private:
    const GridWorld& grid_;
    const TimeVaryingField& field_;
    RewardModel reward_;
    NoiseConfig noise_;
    TvmdpOptions options_;
    int replan_every_;
    TvmdpSolution solution_;
    std::unordered_map<State, Eigen::VectorXd> warm_starts_;
};

/// Time-layered baseline: one solve at episode start; execution indexes the
/// layer of the current wall-clock time.
class DtmdpPolicySource final : public PolicySource {
  public:
    DtmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field, RewardModel reward,
                      NoiseConfig noise, DtmdpOptions options);

    void plan(State s, double t) override;
    const std::vector<int>& action_set(State s, double t) const override;
    const DtmdpSolution& solution() const { return solution_; }

  private:
    const GridWorld& grid_;
    const TimeVaryingField& field_;
    RewardModel reward_;
    NoiseConfig noise_;
    DtmdpOptions options_;
    DtmdpSolution solution_;
    bool solved_ = false;
};

/// Prioritized-sweeping baseline with the same receding-horizon cadence as
/// the TVMDP (its greedy lookahead is likewise anchored at s0).
class AtmdpPolicySource final : public PolicySource {
  public:
    AtmdpPolicySource(const GridWorld& grid, const TimeVaryingField& field, RewardModel reward,
                      NoiseConfig noise, AtmdpOptions options = {}, int replan_every = 1);

    void plan(State s, double t) override;
    const std::vector<int>& action_set(State s, double t) const override;
    int replan_interval() const override { return replan_every_; }
    const AtmdpSolution& solution() const { return solution_; }

  private:
    const GridWorld& grid_;
    const TimeVaryingField& field_;
    RewardModel reward_;
    NoiseConfig noise_;
    AtmdpOptions options_;
    int replan_every_;
    AtmdpSolution solution_;
};

}  // namespace tvmdp
