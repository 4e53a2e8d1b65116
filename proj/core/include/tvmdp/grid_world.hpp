#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace tvmdp {

using State = std::int32_t;

inline constexpr int kNumActions = 9;
inline constexpr int kIdleAction = 8;

/// One of the nine discrete controls: eight compass moves plus idle.
/// `unit_direction` has norm 1 for compass moves and is exactly zero for idle;
/// the commanded velocity is unit_direction * speed.
struct Action {
    int id = kIdleAction;
    Eigen::Vector2d unit_direction = Eigen::Vector2d::Zero();
    double speed = 0.0;

    bool idle() const { return id == kIdleAction; }
    Eigen::Vector2d velocity() const { return unit_direction * speed; }
};

struct GridSpec {
    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    /// Continuous coordinate of the center of cell (col 0, row 0).
    /// Defaults to (cell_size/2, cell_size/2), i.e. the grid corner at the world origin.
    std::optional<Eigen::Vector2d> origin;
    State goal = 0;
    /// Commanded robot speed in m/s, shared by all non-idle actions.
    double speed = 1.0;
    std::vector<State> obstacles;
};

/// Uniform 2-D grid of cell-center states with row-major ids
/// (s = row * width + col, counting from the origin cell) and the
/// 9-action neighborhood topology. Immutable after construction and
/// safe to share across threads.
class GridWorld {
  public:
    struct Neighbor {
        Action action;
        State successor;
    };

    explicit GridWorld(GridSpec spec);

    int width() const { return spec_.width; }
    int height() const { return spec_.height; }
    double cell_size() const { return spec_.cell_size; }
    double speed() const { return spec_.speed; }
    const Eigen::Vector2d& origin() const { return origin_; }
    State goal() const { return spec_.goal; }

    /// Total number of cells, including blocked ones. State ids range over [0, num_cells).
    int num_cells() const { return spec_.width * spec_.height; }
    /// Number of valid (non-blocked) states.
    int num_states() const { return num_states_; }

    bool valid_id(State s) const { return s >= 0 && s < num_cells(); }
    bool blocked(State s) const { return blocked_[static_cast<std::size_t>(s)]; }

    int col_of(State s) const { return s % spec_.width; }
    int row_of(State s) const { return s / spec_.width; }
    State id_at(int col, int row) const { return static_cast<State>(row) * spec_.width + col; }

    /// Continuous coordinate of the cell center of state s.
    /// Throws std::out_of_range for ids outside the grid or on blocked cells.
    Eigen::Vector2d state_center(State s) const;

    /// Nearest-cell-center state for a continuous position. Out-of-grid
    /// positions clamp to the nearest boundary cell; exact midpoints tie
    /// toward the smaller state id. Never returns a blocked cell.
    State locate(const Eigen::Vector2d& x) const;

    /// Admissible (action, intended successor) pairs of s in action-id order.
    /// Idle always maps s to itself; moves whose target is off-grid or blocked
    /// are omitted. Throws std::out_of_range for invalid s.
    const std::vector<Neighbor>& neighbors(State s) const;

    const std::array<Action, kNumActions>& actions() const { return actions_; }

    /// Reverse move of a non-idle action id (E <-> W, NE <-> SW, ...).
    static int opposite_action(int action_id);

    /// Clamp a continuous position to the physical arena, i.e. the union of
    /// all cells including the half-cell margin around boundary centers.
    Eigen::Vector2d clamp_to_bounds(const Eigen::Vector2d& x) const;

  private:
    GridSpec spec_;
    Eigen::Vector2d origin_;
    std::array<Action, kNumActions> actions_{};
    std::vector<bool> blocked_;
    std::vector<std::vector<Neighbor>> neighbors_;
    int num_states_ = 0;
};

}  // namespace tvmdp
