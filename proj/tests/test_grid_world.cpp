#include "tvmdp/grid_world.hpp"

#include "tvmdp/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace tvmdp;

namespace {

GridWorld make_10x10() {
    GridSpec spec;
    spec.width = 10;
    spec.height = 10;
    spec.cell_size = 1.0;
    spec.goal = 99;
    return GridWorld(spec);
}

}  // namespace

TEST_CASE("state centers follow row-major index arithmetic") {
    const GridWorld grid = make_10x10();
    CHECK(grid.state_center(0) == Eigen::Vector2d(0.5, 0.5));
    CHECK(grid.state_center(11) == Eigen::Vector2d(1.5, 1.5));
    CHECK(grid.state_center(9) == Eigen::Vector2d(9.5, 0.5));
    CHECK_THROWS_AS(grid.state_center(100), std::out_of_range);
    CHECK_THROWS_AS(grid.state_center(-1), std::out_of_range);
}

TEST_CASE("locate round-trips every state center") {
    const GridWorld grid = make_10x10();
    for (State s = 0; s < grid.num_cells(); ++s) CHECK(grid.locate(grid.state_center(s)) == s);
}

TEST_CASE("locate matches a nearest-center brute force on random points") {
    const GridWorld grid = make_10x10();
    CounterRng rng(7);
    for (int i = 0; i < 500; ++i) {
        const Eigen::Vector2d x(rng.next_unit() * 12.0 - 1.0, rng.next_unit() * 12.0 - 1.0);
        State best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (State s = 0; s < grid.num_cells(); ++s) {
            const double d = (x - grid.state_center(s)).norm();
            if (d < best_d - 1e-12) {
                best_d = d;
                best = s;
            }
        }
        CHECK(grid.locate(x) == best);
    }
    // Hand case from the nearest-center rule: (1.4, 0.6) is closest to the
    // center (1.5, 0.5), column 1 row 0.
    CHECK(grid.locate({1.4, 0.6}) == 1);
}

TEST_CASE("out-of-grid positions clamp to boundary cells") {
    const GridWorld grid = make_10x10();
    CHECK(grid.locate({-5.0, -5.0}) == 0);
    CHECK(grid.locate({50.0, 50.0}) == 99);
    CHECK(grid.locate({-5.0, 4.6}) == 40);
}

TEST_CASE("midpoint ties resolve toward the smaller state id") {
    const GridWorld grid = make_10x10();
    CHECK(grid.locate({1.0, 0.5}) == 0);  // between columns 0 and 1
    CHECK(grid.locate({0.5, 1.0}) == 0);  // between rows 0 and 1
}

TEST_CASE("interior states have nine neighbors including the idle self-loop") {
    const GridWorld grid = make_10x10();
    const auto& nbs = grid.neighbors(55);
    CHECK(nbs.size() == 9);
    bool has_idle = false;
    for (const auto& nb : nbs)
        if (nb.action.idle()) {
            has_idle = true;
            CHECK(nb.successor == 55);
        }
    CHECK(has_idle);
}

TEST_CASE("corner state keeps only E, NE, N and idle") {
    const GridWorld grid = make_10x10();
    const auto& nbs = grid.neighbors(0);
    CHECK(nbs.size() == 4);
    std::set<State> succ;
    for (const auto& nb : nbs) succ.insert(nb.successor);
    CHECK(succ == std::set<State>{0, 1, 10, 11});
}

TEST_CASE("a state walled in by obstacles keeps only the idle self-loop") {
    GridSpec spec;
    spec.width = 3;
    spec.height = 3;
    spec.obstacles = {0, 1, 2, 3, 5, 6, 7, 8};
    spec.goal = 4;
    const GridWorld grid(spec);
    const auto& nbs = grid.neighbors(4);
    REQUIRE(nbs.size() == 1);
    CHECK(nbs[0].action.idle());
    CHECK(nbs[0].successor == 4);
    CHECK_THROWS_AS(grid.neighbors(3), std::out_of_range);  // blocked cell
}

TEST_CASE("neighborhood symmetry holds via opposite actions") {
    const GridWorld grid = make_10x10();
    for (State s = 0; s < grid.num_cells(); ++s) {
        for (const auto& nb : grid.neighbors(s)) {
            if (nb.action.idle()) continue;
            const int back = GridWorld::opposite_action(nb.action.id);
            bool found = false;
            for (const auto& rnb : grid.neighbors(nb.successor))
                if (rnb.action.id == back && rnb.successor == s) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("non-idle action directions are unit length") {
    const GridWorld grid = make_10x10();
    for (const auto& a : grid.actions()) {
        if (a.idle())
            CHECK(a.unit_direction == Eigen::Vector2d::Zero());
        else
            CHECK(std::abs(a.unit_direction.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("construction rejects bad goals and obstacle ids") {
    GridSpec spec;
    spec.width = 4;
    spec.height = 4;
    spec.goal = 16;
    CHECK_THROWS_AS(GridWorld{spec}, std::invalid_argument);
    spec.goal = 3;
    spec.obstacles = {3};
    CHECK_THROWS_AS(GridWorld{spec}, std::invalid_argument);  // goal blocked
    spec.obstacles = {42};
    CHECK_THROWS_AS(GridWorld{spec}, std::invalid_argument);
}

TEST_CASE("clamp_to_bounds pins positions to the arena walls") {
    const GridWorld grid = make_10x10();
    CHECK(grid.clamp_to_bounds({-3.0, 5.0}) == Eigen::Vector2d(0.0, 5.0));
    CHECK(grid.clamp_to_bounds({11.0, 12.0}) == Eigen::Vector2d(10.0, 10.0));
    CHECK(grid.clamp_to_bounds({4.2, 4.8}) == Eigen::Vector2d(4.2, 4.8));
}
