#include "tvmdp/grid_world.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tvmdp {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Action-id order: E, NE, N, NW, W, SW, S, SE, idle.
constexpr int kColStep[kNumActions] = {1, 1, 0, -1, -1, -1, 0, 1, 0};
constexpr int kRowStep[kNumActions] = {0, 1, 1, 1, 0, -1, -1, -1, 0};

Eigen::Vector2d unit_direction_of(int action_id) {
    const double dc = kColStep[action_id];
    const double dr = kRowStep[action_id];
    if (action_id == kIdleAction) return Eigen::Vector2d::Zero();
    if (dc != 0.0 && dr != 0.0) return {dc * kInvSqrt2, dr * kInvSqrt2};
    return {dc, dr};
}

}  // namespace

GridWorld::GridWorld(GridSpec spec) : spec_(std::move(spec)) {
    if (spec_.width <= 0 || spec_.height <= 0)
        throw std::invalid_argument("GridWorld: width and height must be positive");
    if (!(spec_.cell_size > 0.0))
        throw std::invalid_argument("GridWorld: cell_size must be positive");
    if (!(spec_.speed > 0.0))
        throw std::invalid_argument("GridWorld: speed must be positive");

    origin_ = spec_.origin.value_or(
        Eigen::Vector2d(0.5 * spec_.cell_size, 0.5 * spec_.cell_size));

    blocked_.assign(static_cast<std::size_t>(num_cells()), false);
    for (State s : spec_.obstacles) {
        if (!valid_id(s))
            throw std::invalid_argument("GridWorld: obstacle id " + std::to_string(s) +
                                        " outside grid");
        blocked_[static_cast<std::size_t>(s)] = true;
    }
    num_states_ = 0;
    for (bool b : blocked_)
        if (!b) ++num_states_;
    if (num_states_ == 0) throw std::invalid_argument("GridWorld: all cells blocked");

    if (!valid_id(spec_.goal) || blocked_[static_cast<std::size_t>(spec_.goal)])
        throw std::invalid_argument("GridWorld: goal must be a valid, non-blocked state");

    for (int a = 0; a < kNumActions; ++a) {
        actions_[a].id = a;
        actions_[a].unit_direction = unit_direction_of(a);
        actions_[a].speed = a == kIdleAction ? 0.0 : spec_.speed;
    }

    neighbors_.resize(static_cast<std::size_t>(num_cells()));
    for (State s = 0; s < num_cells(); ++s) {
        if (blocked_[static_cast<std::size_t>(s)]) continue;
        auto& list = neighbors_[static_cast<std::size_t>(s)];
        const int col = col_of(s);
        const int row = row_of(s);
        for (int a = 0; a < kNumActions; ++a) {
            const int nc = col + kColStep[a];
            const int nr = row + kRowStep[a];
            if (nc < 0 || nc >= spec_.width || nr < 0 || nr >= spec_.height) continue;
            const State succ = id_at(nc, nr);
            if (blocked_[static_cast<std::size_t>(succ)]) continue;
            list.push_back(Neighbor{actions_[a], succ});
        }
    }
}

Eigen::Vector2d GridWorld::state_center(State s) const {
    if (!valid_id(s) || blocked(s))
        throw std::out_of_range("GridWorld::state_center: invalid state id " + std::to_string(s));
    return origin_ + spec_.cell_size * Eigen::Vector2d(col_of(s), row_of(s));
}

State GridWorld::locate(const Eigen::Vector2d& x) const {
    // Nearest center index; exact midpoints round down so ties go to the
    // smaller state id.
    const auto nearest = [&](double v, double o, int n) {
        const double u = (v - o) / spec_.cell_size;
        const auto i = static_cast<long>(std::ceil(u - 0.5));
        if (i < 0) return 0;
        if (i >= n) return n - 1;
        return static_cast<int>(i);
    };
    const int col = nearest(x.x(), origin_.x(), spec_.width);
    const int row = nearest(x.y(), origin_.y(), spec_.height);
    const State s = id_at(col, row);
    if (!blocked_[static_cast<std::size_t>(s)]) return s;

    // Blocked nearest cell: fall back to a scan over free cells.
    State best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (State c = 0; c < num_cells(); ++c) {
        if (blocked_[static_cast<std::size_t>(c)]) continue;
        const Eigen::Vector2d center =
            origin_ + spec_.cell_size * Eigen::Vector2d(col_of(c), row_of(c));
        const double d = (x - center).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

const std::vector<GridWorld::Neighbor>& GridWorld::neighbors(State s) const {
    if (!valid_id(s) || blocked(s))
        throw std::out_of_range("GridWorld::neighbors: invalid state id " + std::to_string(s));
    return neighbors_[static_cast<std::size_t>(s)];
}

int GridWorld::opposite_action(int action_id) {
    if (action_id < 0 || action_id >= kIdleAction)
        throw std::invalid_argument("opposite_action: not a compass action");
    return (action_id + 4) % 8;
}

Eigen::Vector2d GridWorld::clamp_to_bounds(const Eigen::Vector2d& x) const {
    const double half = 0.5 * spec_.cell_size;
    const double lo_x = origin_.x() - half;
    const double hi_x = origin_.x() + (spec_.width - 1) * spec_.cell_size + half;
    const double lo_y = origin_.y() - half;
    const double hi_y = origin_.y() + (spec_.height - 1) * spec_.cell_size + half;
    return {std::min(std::max(x.x(), lo_x), hi_x), std::min(std::max(x.y(), lo_y), hi_y)};
}

}  // namespace tvmdp
