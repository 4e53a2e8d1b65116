#pragma once

#include "tvmdp/disturbance.hpp"
#include "tvmdp/grid_world.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace tvmdp {

/// Displacement-noise configuration. Sigmas are standard deviations (meters)
/// of the independent action- and disturbance-induced displacement Gaussians
/// accumulated over one `duration` (the fixed motion application time, which
/// is also the simulator step and the idle dwell baseline).
struct NoiseConfig {
    double sigma_action = 0.0;
    double sigma_disturbance = 0.0;
    double duration = 1.0;

    /// Paper-free defaults: sigma_a = 0.1 * cell, sigma_d = 0.2 * cell,
    /// duration = cell / speed (one nominal hop).
    static NoiseConfig defaults_for(const GridWorld& grid) {
        NoiseConfig cfg;
        cfg.sigma_action = 0.1 * grid.cell_size();
        cfg.sigma_disturbance = 0.2 * grid.cell_size();
        cfg.duration = grid.cell_size() / grid.speed();
        return cfg;
    }

    Eigen::Matrix2d action_covariance() const {
        return sigma_action * sigma_action * Eigen::Matrix2d::Identity();
    }
    Eigen::Matrix2d disturbance_covariance() const {
        return sigma_disturbance * sigma_disturbance * Eigen::Matrix2d::Identity();
    }
};

/// Gaussian displacement after applying an action under disturbance for a
/// fixed time: x ~ N(mean, covariance), both in meters relative to the
/// starting position.
struct GaussianMotion {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
    double duration = 1.0;
};

/// Probability mass over the one-hop successors of `source`. Entries are
/// aligned one-to-one with grid.neighbors(source) (same order), so PMFs of
/// different actions at the same state share their successor layout.
struct TransitionPmf {
    State source = 0;
    double time = 0.0;
    struct Entry {
        State successor;
        double probability;
    };
    std::vector<Entry> entries;

    double probability_of(State successor) const {
        for (const auto& e : entries)
            if (e.successor == successor) return e.probability;
        return 0.0;
    }
};

/// Combine the commanded velocity with the disturbance at the state center:
/// mean = (action velocity + d(x(s), t)) * duration, covariance = the sum of
/// the two independent displacement covariances. Throws std::invalid_argument
/// if the configured covariance is not positive definite.
GaussianMotion motion_model(const GridWorld& grid, State s, const Action& action,
                            const TimeVaryingField& field, double t, const NoiseConfig& noise);

/// Pure-action variant used by the T_a (non-synergistic) transition mode:
/// no disturbance mean and only the action covariance.
GaussianMotion motion_model_action_only(const GridWorld& grid, State s, const Action& action,
                                        const NoiseConfig& noise);

/// Integrate the displaced Gaussian density over each one-hop successor cell
/// (composite tensor Gauss-Legendre, 5 nodes per axis per panel, panels sized
/// to the smallest covariance standard deviation) and renormalize the mass
/// over N(s). Throws std::invalid_argument on a degenerate covariance.
TransitionPmf discretize(const GaussianMotion& motion, State source, const GridWorld& grid);

/// discretize(motion_model(...)) convenience.
TransitionPmf action_pmf(const GridWorld& grid, State s, int action_id,
                         const TimeVaryingField& field, double t, const NoiseConfig& noise);

/// Equal-weight mixture (w_i = 1/k exactly) of the per-action PMFs of the
/// given tied actions. Throws std::invalid_argument on an empty action list.
TransitionPmf mixture_pmf(const GridWorld& grid, State s, std::span<const int> action_ids,
                          const TimeVaryingField& field, double t, const NoiseConfig& noise);

/// Equal-weight mixture of already-built aligned PMFs.
TransitionPmf mixture_of(std::span<const TransitionPmf> pmfs);

}  // namespace tvmdp
