#include "tvmdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

namespace tvmdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<TransitionPmf> state_pmfs(const GridWorld& grid, const TimeVaryingField& field,
                                      const NoiseConfig& noise, State s, double t) {
    const auto& nbs = grid.neighbors(s);
    std::vector<TransitionPmf> pmfs;
    pmfs.reserve(nbs.size());
    for (const auto& nb : nbs) {
        auto pmf = discretize(motion_model(grid, s, nb.action, field, t, noise), s, grid);
        pmf.time = t;
        pmfs.push_back(std::move(pmf));
    }
    return pmfs;
}

// Index of an action id within neighbors(s); neighbors are in ascending
// action-id order.
std::size_t neighbor_index_of(const std::vector<GridWorld::Neighbor>& nbs, int action_id) {
    for (std::size_t k = 0; k < nbs.size(); ++k)
        if (nbs[k].action.id == action_id) return k;
    throw std::invalid_argument("action " + std::to_string(action_id) + " not admissible here");
}

}  // namespace

void RewardModel::validate() const {
    if (!(goal_reward >= 0.0)) throw std::invalid_argument("RewardModel: goal_reward must be >= 0");
    if (!(step_cost <= 0.0)) throw std::invalid_argument("RewardModel: step_cost must be <= 0");
    if (!(discount >= 0.0 && discount < 1.0))
        throw std::invalid_argument("RewardModel: discount must lie in [0, 1)");
}

PmfTable build_pmf_table(const GridWorld& grid, const TimeVaryingField& field,
                         const NoiseConfig& noise, std::span<const double> query_times) {
    if (query_times.size() != static_cast<std::size_t>(grid.num_cells()))
        throw std::invalid_argument("build_pmf_table: need one query time per cell");
    PmfTable table;
    table.per_state.resize(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        table.per_state[static_cast<std::size_t>(s)] =
            state_pmfs(grid, field, noise, s, query_times[static_cast<std::size_t>(s)]);
    }
    return table;
}

PmfTable build_action_only_pmf_table(const GridWorld& grid, const NoiseConfig& noise) {
    PmfTable table;
    table.per_state.resize(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        const auto& nbs = grid.neighbors(s);
        auto& pmfs = table.per_state[static_cast<std::size_t>(s)];
        pmfs.reserve(nbs.size());
        for (const auto& nb : nbs)
            pmfs.push_back(discretize(motion_model_action_only(grid, s, nb.action, noise), s, grid));
    }
    return table;
}

std::vector<TransitionPmf> policy_mixture(const GridWorld& grid, const PmfTable& table,
                                          const Policy& policy) {
    std::vector<TransitionPmf> mixtures(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        const auto& nbs = grid.neighbors(s);
        const auto& set = policy.at(s);
        if (set.empty()) throw std::invalid_argument("policy_mixture: empty action set");
        const auto& pmfs = table.per_state[static_cast<std::size_t>(s)];
        std::vector<TransitionPmf> parts;
        parts.reserve(set.size());
        for (int a : set) parts.push_back(pmfs[neighbor_index_of(nbs, a)]);
        mixtures[static_cast<std::size_t>(s)] = mixture_of(parts);
    }
    return mixtures;
}

double bellman_sweep(const GridWorld& grid, const PmfTable& pmfs, const RewardModel& reward,
                     const std::vector<double>& value, std::vector<double>& next_value) {
    next_value.assign(value.size(), 0.0);
    double change = 0.0;
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        if (s == grid.goal()) {
            next_value[static_cast<std::size_t>(s)] = reward.goal_reward;
            continue;
        }
        const auto& state_pmfs = pmfs.per_state[static_cast<std::size_t>(s)];
        double best = -kInf;
        for (const auto& pmf : state_pmfs) {
            double q = 0.0;
            for (const auto& e : pmf.entries)
                q += e.probability *
                     (reward.step_cost +
                      reward.discount * value[static_cast<std::size_t>(e.successor)]);
            best = std::max(best, q);
        }
        next_value[static_cast<std::size_t>(s)] = best;
        change = std::max(change, std::abs(best - value[static_cast<std::size_t>(s)]));
    }
    return change;
}

Policy extract_policy(const GridWorld& grid, const PmfTable& pmfs, const RewardModel& reward,
                      const std::vector<double>& value, double tie_tol) {
    Policy policy;
    policy.action_sets.resize(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        if (grid.blocked(s)) continue;
        auto& set = policy.action_sets[static_cast<std::size_t>(s)];
        if (s == grid.goal()) {
            set = {kIdleAction};
            continue;
        }
        const auto& nbs = grid.neighbors(s);
        const auto& state_pmfs = pmfs.per_state[static_cast<std::size_t>(s)];
        std::vector<double> q(state_pmfs.size(), 0.0);
        double best = -kInf;
        for (std::size_t k = 0; k < state_pmfs.size(); ++k) {
            for (const auto& e : state_pmfs[k].entries)
                q[k] += e.probability *
                        (reward.step_cost +
                         reward.discount * value[static_cast<std::size_t>(e.successor)]);
            best = std::max(best, q[k]);
        }
        for (std::size_t k = 0; k < q.size(); ++k)
            if (q[k] >= best - tie_tol) set.push_back(nbs[k].action.id);
    }
    return policy;
}

MdpSolution mdp_value_iteration(const GridWorld& grid, const PmfTable& pmfs,
                                const RewardModel& reward, const ViOptions& options) {
    reward.validate();
    MdpSolution solution;
    std::vector<double> value(static_cast<std::size_t>(grid.num_cells()), 0.0);
    value[static_cast<std::size_t>(grid.goal())] = reward.goal_reward;
    std::vector<double> next(value.size(), 0.0);

    double change = kInf;
    int k = 0;
    while (k < options.max_iter) {
        change = bellman_sweep(grid, pmfs, reward, value, next);
        value.swap(next);
        ++k;
        if (change <= options.tol) break;
    }

    solution.value.values = std::move(value);
    solution.value.epoch = k;
    solution.iterations = k;
    solution.final_change = change;
    solution.policy = extract_policy(grid, pmfs, reward, solution.value.values, options.tie_tol);
    return solution;
}

TvmdpSolution tvmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, State s0, double t0,
                          const TvmdpOptions& options,
                          std::unordered_map<State, Eigen::VectorXd>* warm_starts) {
    reward.validate();
    if (!grid.valid_id(s0) || grid.blocked(s0))
        throw std::invalid_argument("tvmdp_solve: invalid start state");

    const auto n = static_cast<std::size_t>(grid.num_cells());
    std::vector<double> value(n, 0.0);
    value[static_cast<std::size_t>(grid.goal())] = reward.goal_reward;
    std::vector<double> next(n, 0.0);
    std::vector<double> hop_times(n, 0.0);     // t(s0, s) estimates, seconds
    std::vector<double> query_times(n, t0);    // absolute field times per state

    std::unordered_map<State, Eigen::VectorXd> local_warm;
    if (warm_starts == nullptr) warm_starts = &local_warm;

    // The pure-action table is time-invariant; build it once if selected.
    PmfTable action_only;
    if (!options.kolmogorov_synergistic)
        action_only = build_action_only_pmf_table(grid, noise);

    TvmdpSolution solution;
    const double dwell = options.timing.resolved_idle_dwell(grid);

    int k = 0;
    double value_change = kInf;
    double time_change = kInf;
    while (k < options.max_iter) {
        // Spatial channel: one Bellman sweep with each state's transition
        // model taken at its estimated arrival time.
        const PmfTable pmfs = build_pmf_table(grid, field, noise, query_times);
        value_change = bellman_sweep(grid, pmfs, reward, value, next);
        value.swap(next);
        Policy policy = extract_policy(grid, pmfs, reward, value, options.tie_tol);
        ++k;

        // Temporal channel: local one-hop estimates, then the global
        // multi-hop times under the updated optimal-action mixtures.
        const OneHopTable one_hop =
            build_one_hop_table(grid, field, query_times, noise, options.timing);
        const std::vector<TransitionPmf> mixtures =
            options.kolmogorov_synergistic ? policy_mixture(grid, pmfs, policy)
                                           : policy_mixture(grid, action_only, policy);
        std::vector<double> fresh;
        try {
            fresh = multi_hop_times(grid, s0, mixtures, one_hop, options.timing, &solution.stats,
                                    warm_starts);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("tvmdp_solve: iteration " + std::to_string(k) + ": " +
                                     e.what());
        }

        time_change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (grid.blocked(static_cast<State>(s))) continue;
            const double denom = std::max(std::abs(fresh[s]), dwell);
            time_change = std::max(time_change, std::abs(fresh[s] - hop_times[s]) / denom);
        }
        hop_times = std::move(fresh);
        for (std::size_t s = 0; s < n; ++s)
            query_times[s] = t0 + std::min(hop_times[s], kUnreachableTime);

        solution.policy = std::move(policy);
        if (k >= 2 && value_change <= options.tol && time_change <= options.time_rel_tol) break;
    }

    solution.value.values = std::move(value);
    solution.value.epoch = k;
    solution.iterations = k;
    solution.final_value_change = value_change;
    solution.final_time_change = time_change;
    solution.times.anchor = s0;
    solution.times.one_hop = build_one_hop_table(grid, field, query_times, noise, options.timing);
    solution.times.multi_hop = std::move(hop_times);
    return solution;
}

int DtmdpSolution::layer_at(double t) const {
    const auto l = static_cast<long>(std::floor((t - t0) / layer_dt));
    if (l < 0) return 0;
    if (l >= layers) return layers - 1;
    return static_cast<int>(l);
}

const std::vector<int>& DtmdpSolution::action_set_at(State s, double t) const {
    return action_sets[static_cast<std::size_t>(layer_at(t)) * static_cast<std::size_t>(cells) +
                       static_cast<std::size_t>(s)];
}

Policy DtmdpSolution::layer_policy(int layer) const {
    Policy policy;
    const auto base = static_cast<std::size_t>(layer) * static_cast<std::size_t>(cells);
    policy.action_sets.assign(action_sets.begin() + static_cast<std::ptrdiff_t>(base),
                              action_sets.begin() + static_cast<std::ptrdiff_t>(base + cells));
    return policy;
}

DtmdpSolution dtmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, double t0,
                          const DtmdpOptions& options) {
    reward.validate();
    if (options.layers < 2) throw std::invalid_argument("dtmdp_solve: layers must be >= 2");
    const int n = grid.num_cells();
    const auto total = static_cast<std::size_t>(n) * static_cast<std::size_t>(options.layers);
    if (total > options.state_cap)
        throw std::invalid_argument("dtmdp_solve: " + std::to_string(total) +
                                    " layered states exceed the cap of " +
                                    std::to_string(options.state_cap));

    const double nominal_hop = grid.cell_size() / grid.speed();
    const double horizon =
        options.horizon > 0.0 ? options.horizon : options.layers * nominal_hop;
    const double dt = horizon / options.layers;

    // Per-layer spatial PMFs, one-hop times, and layer advances.
    std::vector<PmfTable> layer_pmfs;
    layer_pmfs.reserve(static_cast<std::size_t>(options.layers));
    std::vector<std::vector<std::vector<int>>> advance(static_cast<std::size_t>(options.layers));
    for (int l = 0; l < options.layers; ++l) {
        const std::vector<double> query(static_cast<std::size_t>(n), t0 + l * dt);
        layer_pmfs.push_back(build_pmf_table(grid, field, noise, query));
        const OneHopTable one_hop = build_one_hop_table(grid, field, query, noise, options.timing);
        auto& layer_adv = advance[static_cast<std::size_t>(l)];
        layer_adv.resize(static_cast<std::size_t>(n));
        for (State s = 0; s < n; ++s) {
            if (grid.blocked(s)) continue;
            const auto& nbs = grid.neighbors(s);
            auto& row = layer_adv[static_cast<std::size_t>(s)];
            row.resize(nbs.size());
            for (std::size_t k = 0; k < nbs.size(); ++k) {
                const double tau = std::min(one_hop.times[static_cast<std::size_t>(s)][k],
                                            kUnreachableTime);
                auto steps = static_cast<long>(std::llround(tau / dt));
                if (!nbs[k].action.idle()) steps = std::max(steps, 1L);  // time moves forward
                if (steps < 0) steps = 0;
                const long target = std::min<long>(l + steps, options.layers - 1);
                row[k] = static_cast<int>(target);
            }
        }
    }

    DtmdpSolution solution;
    solution.layers = options.layers;
    solution.layer_dt = dt;
    solution.t0 = t0;
    solution.cells = n;
    solution.values.assign(total, 0.0);

    const auto idx = [n](int layer, State s) {
        return static_cast<std::size_t>(layer) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(s);
    };
    for (int l = 0; l < options.layers; ++l)
        solution.values[idx(l, grid.goal())] = reward.goal_reward;

    std::vector<double> next(total, 0.0);
    double change = kInf;
    int iter = 0;
    while (iter < options.max_iter) {
        change = 0.0;
        for (int l = 0; l < options.layers; ++l) {
            const auto& pmfs = layer_pmfs[static_cast<std::size_t>(l)];
            for (State s = 0; s < n; ++s) {
                if (grid.blocked(s)) continue;
                if (s == grid.goal()) {
                    next[idx(l, s)] = reward.goal_reward;
                    continue;
                }
                const auto& state_pmfs = pmfs.per_state[static_cast<std::size_t>(s)];
                const auto& adv = advance[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)];
                double best = -kInf;
                for (std::size_t k = 0; k < state_pmfs.size(); ++k) {
                    const int target_layer = adv[k];
                    double q = 0.0;
                    for (const auto& e : state_pmfs[k].entries)
                        q += e.probability *
                             (reward.step_cost +
                              reward.discount * solution.values[idx(target_layer, e.successor)]);
                    best = std::max(best, q);
                }
                next[idx(l, s)] = best;
                change = std::max(change, std::abs(best - solution.values[idx(l, s)]));
            }
        }
        solution.values.swap(next);
        ++iter;
        if (change <= options.tol) break;
    }
    solution.iterations = iter;

    // Extract per-(layer, state) argmax sets.
    solution.action_sets.resize(total);
    for (int l = 0; l < options.layers; ++l) {
        const auto& pmfs = layer_pmfs[static_cast<std::size_t>(l)];
        for (State s = 0; s < n; ++s) {
            if (grid.blocked(s)) continue;
            auto& set = solution.action_sets[idx(l, s)];
            if (s == grid.goal()) {
                set = {kIdleAction};
                continue;
            }
            const auto& nbs = grid.neighbors(s);
            const auto& state_pmfs = pmfs.per_state[static_cast<std::size_t>(s)];
            const auto& adv = advance[static_cast<std::size_t>(l)][static_cast<std::size_t>(s)];
            std::vector<double> q(state_pmfs.size(), 0.0);
            double best = -kInf;
            for (std::size_t k = 0; k < state_pmfs.size(); ++k) {
                for (const auto& e : state_pmfs[k].entries)
                    q[k] += e.probability *
                            (reward.step_cost +
                             reward.discount * solution.values[idx(adv[k], e.successor)]);
                best = std::max(best, q[k]);
            }
            for (std::size_t k = 0; k < q.size(); ++k)
                if (q[k] >= best - options.tie_tol) set.push_back(nbs[k].action.id);
        }
    }
    return solution;
}

AtmdpSolution atmdp_solve(const GridWorld& grid, const TimeVaryingField& field,
                          const RewardModel& reward, const NoiseConfig& noise, State s0, double t0,
                          const AtmdpOptions& options) {
    reward.validate();
    if (!grid.valid_id(s0) || grid.blocked(s0))
        throw std::invalid_argument("atmdp_solve: invalid start state");
    const int n = grid.num_cells();

    // Greedy lookahead times: accumulate one-hop estimates outward from s0,
    // evaluating each hop at the arrival time of its source.
    std::vector<double> lookahead(static_cast<std::size_t>(n), kUnreachableTime);
    {
        std::vector<double> dist(static_cast<std::size_t>(n), kInf);
        std::vector<bool> done(static_cast<std::size_t>(n), false);
        using Item = std::pair<double, State>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[static_cast<std::size_t>(s0)] = 0.0;
        heap.emplace(0.0, s0);
        while (!heap.empty()) {
            const auto [d, s] = heap.top();
            heap.pop();
            if (done[static_cast<std::size_t>(s)]) continue;
            done[static_cast<std::size_t>(s)] = true;
            for (const auto& nb : grid.neighbors(s)) {
                if (nb.action.idle() || done[static_cast<std::size_t>(nb.successor)]) continue;
                const double w =
                    one_hop_time(grid, s, nb.successor, field, t0 + d, noise, options.timing);
                if (!std::isfinite(w)) continue;
                if (d + w < dist[static_cast<std::size_t>(nb.successor)]) {
                    dist[static_cast<std::size_t>(nb.successor)] = d + w;
                    heap.emplace(d + w, nb.successor);
                }
            }
        }
        for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s)
            if (std::isfinite(dist[s])) lookahead[s] = std::min(dist[s], kUnreachableTime);
        lookahead[static_cast<std::size_t>(s0)] = 0.0;
    }

    // Transition models frozen at the greedy arrival times.
    std::vector<double> query(static_cast<std::size_t>(n), t0);
    for (std::size_t s = 0; s < static_cast<std::size_t>(n); ++s)
        query[s] = t0 + lookahead[s];
    const PmfTable pmfs = build_pmf_table(grid, field, noise, query);

    // Reverse adjacency for priority propagation.
    std::vector<std::vector<State>> predecessors(static_cast<std::size_t>(n));
    for (State s = 0; s < n; ++s) {
        if (grid.blocked(s)) continue;
        for (const auto& nb : grid.neighbors(s))
            if (nb.successor != s) predecessors[static_cast<std::size_t>(nb.successor)].push_back(s);
    }

    std::vector<double> value(static_cast<std::size_t>(n), 0.0);
    value[static_cast<std::size_t>(grid.goal())] = reward.goal_reward;

    const auto backup = [&](State s) {
        const auto& state_pmfs = pmfs.per_state[static_cast<std::size_t>(s)];
        double best = -kInf;
        for (const auto& pmf : state_pmfs) {
            double q = 0.0;
            for (const auto& e : pmf.entries)
                q += e.probability *
                     (reward.step_cost +
                      reward.discount * value[static_cast<std::size_t>(e.successor)]);
            best = std::max(best, q);
        }
        return best;
    };

    // Max transition probability into a successor, for priority scaling.
    const auto max_prob_into = [&](State from, State to) {
        double p = 0.0;
        for (const auto& pmf : pmfs.per_state[static_cast<std::size_t>(from)])
            p = std::max(p, pmf.probability_of(to));
        return p;
    };

    std::vector<double> priority(static_cast<std::size_t>(n), 0.0);
    using Item = std::pair<double, State>;
    std::priority_queue<Item> heap;
    const auto push = [&](State s, double p) {
        if (s == grid.goal() || grid.blocked(s)) return;
        if (p > priority[static_cast<std::size_t>(s)]) {
            priority[static_cast<std::size_t>(s)] = p;
            heap.emplace(p, s);
        }
    };

    // Bootstrap: goal-adjacent states at the maximum finite priority.
    for (State p : predecessors[static_cast<std::size_t>(grid.goal())])
        push(p, std::numeric_limits<double>::max());

    AtmdpSolution solution;
    const long max_backups = options.max_backup_factor * static_cast<long>(n);

    bool clean = false;
    while (!clean && solution.backups < max_backups) {
        while (!heap.empty() && solution.backups < max_backups) {
            const auto [p, s] = heap.top();
            heap.pop();
            if (p != priority[static_cast<std::size_t>(s)]) continue;  // stale entry
            priority[static_cast<std::size_t>(s)] = 0.0;
            const double fresh = backup(s);
            const double delta = std::abs(fresh - value[static_cast<std::size_t>(s)]);
            value[static_cast<std::size_t>(s)] = fresh;
            ++solution.backups;
            if (delta <= options.tol) continue;
            for (State pred : predecessors[static_cast<std::size_t>(s)]) {
                const double cand = reward.discount * max_prob_into(pred, s) * delta;
                if (cand > options.tol) push(pred, cand);
            }
        }
        // Queue drained: verify the Bellman residual everywhere and requeue
        // any stragglers so the tol contract holds on exit.
        clean = true;
        for (State s = 0; s < n; ++s) {
            if (grid.blocked(s) || s == grid.goal()) continue;
            const double resid = std::abs(backup(s) - value[static_cast<std::size_t>(s)]);
            if (resid > options.tol) {
                push(s, resid);
                clean = false;
            }
        }
    }

    solution.value.values = std::move(value);
    solution.value.epoch = static_cast<int>(solution.backups);
    solution.policy = extract_policy(grid, pmfs, reward, solution.value.values, options.tie_tol);
    solution.lookahead_times = std::move(lookahead);
    return solution;
}

}  // namespace tvmdp
