#include "tvmdp/timing.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tvmdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double one_hop_time(const GridWorld& grid, State s, State succ, const TimeVaryingField& field,
                    double t, const NoiseConfig& noise, const TimingConfig& cfg) {
    if (succ == s)
        throw std::invalid_argument("one_hop_time: use the idle dwell for the self hop");
    const Eigen::Vector2d from = grid.state_center(s);
    const Eigen::Vector2d to = grid.state_center(succ);
    const Eigen::Vector2d u = to - from;
    const double distance = u.norm();
    const Eigen::Vector2d u_hat = u / distance;
    const Eigen::Vector2d d = field.query(from, t);

    // Action whose resultant points most nearly toward succ; only resultants
    // with positive projection on u qualify.
    bool found = false;
    Eigen::Vector2d resultant = Eigen::Vector2d::Zero();
    double best_cos = -kInf;
    for (const auto& nb : grid.neighbors(s)) {
        if (nb.action.idle()) continue;
        const Eigen::Vector2d r = nb.action.velocity() + d;
        const double norm = r.norm();
        if (!(norm > 0.0)) continue;
        const double forward = r.dot(u_hat);
        if (forward <= 0.0) continue;
        const double cos_angle = forward / norm;
        if (cos_angle > best_cos) {
            best_cos = cos_angle;
            resultant = r;
            found = true;
        }
    }
    if (!found) return kInf;

    // Rotate so the resultant lies on the first basis. The rotation sends the
    // displacement mean onto that axis by construction, so the transformed
    // mean is (|mean|, 0); the covariance is conjugated numerically.
    const double theta = std::atan2(resultant.y(), resultant.x());
    Eigen::Matrix2d rot;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    const Eigen::Matrix2d cov = noise.action_covariance() + noise.disturbance_covariance();
    const Eigen::Matrix2d cov_rot = rot.transpose() * cov * rot;
    const Eigen::Vector2d mean_rot(resultant.norm() * noise.duration, 0.0);

    // Conditional mean of the on-axis displacement given zero lateral offset.
    if (!(cov_rot(1, 1) > 0.0))
        throw std::invalid_argument("one_hop_time: degenerate covariance");
    const double expected_forward =
        mean_rot.x() + cov_rot(0, 1) / cov_rot(1, 1) * (0.0 - mean_rot.y());
    if (expected_forward <= cfg.epsilon_velocity) return kInf;

    return distance / (expected_forward / noise.duration);
}

double OneHopTable::at(const GridWorld& grid, State s, State succ) const {
    const auto& nbs = grid.neighbors(s);
    for (std::size_t k = 0; k < nbs.size(); ++k)
        if (nbs[k].successor == succ) return times[static_cast<std::size_t>(s)][k];
    throw std::out_of_range("OneHopTable::at: " + std::to_string(succ) +
                            " is not a one-hop successor of " + std::to_string(s));
}

OneHopTable build_one_hop_table(const GridWorld& grid, const TimeVaryingField& field,
                                std::span<const double> query_times, const NoiseConfig& noise,
                                const TimingConfig& cfg) {
    if (query_times.size() != static_cast<std::size_t>(grid.num_cells()))
        throw std::invalid_argument("build_one_hop_table: need one query time per cell");
    const double dwell = cfg.resolved_idle_dwell(grid);
    OneHopTable table;
    table.times.resize(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        const auto& nbs = grid.neighbors(s);
        auto& row = table.times[static_cast<std::size_t>(s)];
        row.resize(nbs.size());
        const double t = query_times[static_cast<std::size_t>(s)];
        for (std::size_t k = 0; k < nbs.size(); ++k)
            row[k] = nbs[k].action.idle()
                         ? dwell
                         : one_hop_time(grid, s, nbs[k].successor, field, t, noise, cfg);
    }
    return table;
}

KolmogorovSystem assemble_system(const GridWorld& grid, State end_state,
                                 std::span<const TransitionPmf> policy_pmfs,
                                 const OneHopTable& one_hop, const TimingConfig&) {
    const int n = grid.num_cells();
    if (!grid.valid_id(end_state) || grid.blocked(end_state))
        throw std::invalid_argument("assemble_system: invalid end state");
    if (policy_pmfs.size() != static_cast<std::size_t>(n) ||
        one_hop.times.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("assemble_system: tables must cover every cell");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * 10);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);

    for (State i = 0; i < n; ++i) {
        if (i == end_state || grid.blocked(i)) {
            triplets.emplace_back(i, i, 1.0);
            continue;
        }
        const auto& pmf = policy_pmfs[static_cast<std::size_t>(i)];
        if (pmf.entries.empty())
            throw std::invalid_argument("assemble_system: missing PMF for state " +
                                        std::to_string(i));
        const auto& row_times = one_hop.times[static_cast<std::size_t>(i)];
        double self_mass = 0.0;
        double expected_hop = 0.0;
        for (std::size_t k = 0; k < pmf.entries.size(); ++k) {
            const auto& e = pmf.entries[k];
            const double tau = std::min(row_times[k], kUnreachableTime);
            expected_hop += e.probability * tau;
            if (e.successor == i) {
                self_mass += e.probability;
            } else if (e.probability != 0.0) {
                triplets.emplace_back(i, e.successor, -e.probability);
            }
        }
        if (self_mass >= 1.0 - 1e-12) {
            // The policy parks all mass on the state itself; it can never
            // reach the end state, so pin it at the sentinel.
            triplets.emplace_back(i, i, 1.0);
            rhs[i] = kUnreachableTime;
            continue;
        }
        triplets.emplace_back(i, i, 1.0 - self_mass);
        rhs[i] = expected_hop;
    }

    KolmogorovSystem system;
    system.end_state = end_state;
    system.matrix.resize(n, n);
    system.matrix.setFromTriplets(triplets.begin(), triplets.end());
    system.matrix.makeCompressed();
    system.rhs = std::move(rhs);
    return system;
}

LinearSolveResult solve_system(const KolmogorovSystem& system, double tol, int max_iterations,
                               SolveStats* stats, const Eigen::VectorXd* warm_start) {
    const auto start = std::chrono::steady_clock::now();

    Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>,
                    Eigen::DiagonalPreconditioner<double>>
        solver;
    solver.setTolerance(tol);
    solver.setMaxIterations(max_iterations);
    solver.compute(system.matrix);

    LinearSolveResult result;
    if (warm_start != nullptr && warm_start->size() == system.rhs.size())
        result.x = solver.solveWithGuess(system.rhs, *warm_start);
    else
        result.x = solver.solve(system.rhs);

    const double rhs_norm = system.rhs.norm();
    const double denom = rhs_norm > 0.0 ? rhs_norm : 1.0;
    result.relative_residual = (system.matrix * result.x - system.rhs).norm() / denom;
    result.iterations = static_cast<int>(solver.iterations());
    result.converged = result.relative_residual <= tol;

    long clamps = 0;
    for (Eigen::Index i = 0; i < result.x.size(); ++i) {
        if (result.x[i] < 0.0) {
            if (result.x[i] < -tol) ++clamps;
            result.x[i] = 0.0;
        }
    }

    if (stats != nullptr) {
        stats->linear_solve_seconds +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        stats->systems_solved += 1;
        stats->krylov_iterations += result.iterations;
        stats->negative_clamps += clamps;
    }
    return result;
}

std::vector<double> multi_hop_times(const GridWorld& grid, State s0,
                                    std::span<const TransitionPmf> policy_pmfs,
                                    const OneHopTable& one_hop, const TimingConfig& cfg,
                                    SolveStats* stats,
                                    std::unordered_map<State, Eigen::VectorXd>* warm_starts) {
    const int n = grid.num_cells();
    if (!grid.valid_id(s0) || grid.blocked(s0))
        throw std::invalid_argument("multi_hop_times: invalid start state");

    std::vector<double> out(static_cast<std::size_t>(n), kUnreachableTime);
    out[static_cast<std::size_t>(s0)] = 0.0;

    // Direct successors take the local estimate.
    std::vector<bool> is_one_hop(static_cast<std::size_t>(n), false);
    const auto& nbs = grid.neighbors(s0);
    const auto& row_times = one_hop.times[static_cast<std::size_t>(s0)];
    for (std::size_t k = 0; k < nbs.size(); ++k) {
        const State succ = nbs[k].successor;
        if (succ == s0) continue;
        is_one_hop[static_cast<std::size_t>(succ)] = true;
        out[static_cast<std::size_t>(succ)] = std::min(row_times[k], kUnreachableTime);
    }

    // Shared coefficient body (I - P) and expected-hop rhs; each end state
    // only swaps one row for the identity, so copy and patch per system.
    KolmogorovSystem base;
    {
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(static_cast<std::size_t>(n) * 10);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (State i = 0; i < n; ++i) {
            if (grid.blocked(i)) {
                triplets.emplace_back(i, i, 1.0);
                continue;
            }
            const auto& pmf = policy_pmfs[static_cast<std::size_t>(i)];
            if (pmf.entries.empty())
                throw std::invalid_argument("multi_hop_times: missing PMF for state " +
                                            std::to_string(i));
            const auto& times_row = one_hop.times[static_cast<std::size_t>(i)];
            double self_mass = 0.0;
            double expected_hop = 0.0;
            for (std::size_t k = 0; k < pmf.entries.size(); ++k) {
                const auto& e = pmf.entries[k];
                expected_hop += e.probability * std::min(times_row[k], kUnreachableTime);
                if (e.successor == i)
                    self_mass += e.probability;
                else if (e.probability != 0.0)
                    triplets.emplace_back(i, e.successor, -e.probability);
            }
            if (self_mass >= 1.0 - 1e-12) {
                triplets.emplace_back(i, i, 1.0);
                rhs[i] = kUnreachableTime;
                continue;
            }
            triplets.emplace_back(i, i, 1.0 - self_mass);
            rhs[i] = expected_hop;
        }
        base.end_state = -1;
        base.matrix.resize(n, n);
        base.matrix.setFromTriplets(triplets.begin(), triplets.end());
        base.matrix.makeCompressed();
        base.rhs = std::move(rhs);
    }

    const int max_iterations = cfg.iteration_cap_factor * std::max(grid.num_states(), 1);

    KolmogorovSystem scratch;
    for (State end = 0; end < n; ++end) {
        if (end == s0 || grid.blocked(end) || is_one_hop[static_cast<std::size_t>(end)]) continue;

        scratch.end_state = end;
        scratch.matrix = base.matrix;
        scratch.rhs = base.rhs;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(scratch.matrix, end);
             it; ++it)
            it.valueRef() = it.col() == end ? 1.0 : 0.0;
        scratch.rhs[end] = 0.0;

        const Eigen::VectorXd* warm = nullptr;
        if (warm_starts != nullptr) {
            const auto found = warm_starts->find(end);
            if (found != warm_starts->end()) warm = &found->second;
        }

        LinearSolveResult solved = solve_system(scratch, cfg.linear_tol, max_iterations, stats, warm);
        if (!solved.converged)
            throw std::runtime_error(
                "multi_hop_times: Kolmogorov system for end state " + std::to_string(end) +
                " did not converge (relative residual " + std::to_string(solved.relative_residual) +
                ")");

        out[static_cast<std::size_t>(end)] =
            std::min(solved.x[static_cast<Eigen::Index>(s0)], kUnreachableTime);
        if (warm_starts != nullptr) (*warm_starts)[end] = std::move(solved.x);
    }
    return out;
}

}  // namespace tvmdp
