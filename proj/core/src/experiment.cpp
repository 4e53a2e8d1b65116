#include "tvmdp/experiment.hpp"

#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace tvmdp {

namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::unique_ptr<PolicySource> make_policy_source(const GridWorld& grid,
                                                 const TimeVaryingField& field,
                                                 const ExperimentConfig& config,
                                                 const SolverSpec& spec) {
    switch (spec.kind) {
        case SolverSpec::Kind::mdp: {
            ViOptions options{spec.tol, spec.max_iter, spec.tie_tol};
            return std::make_unique<MdpPolicySource>(grid, field, config.reward, config.noise,
                                                     options);
        }
        case SolverSpec::Kind::tvmdp: {
            TvmdpOptions options;
            options.tol = spec.tol;
            options.max_iter = spec.max_iter;
            options.time_rel_tol = spec.time_rel_tol;
            options.tie_tol = spec.tie_tol;
            options.kolmogorov_synergistic = spec.kolmogorov_synergistic;
            options.timing = config.timing;
            return std::make_unique<TvmdpPolicySource>(grid, field, config.reward, config.noise,
                                                       options, spec.replan_interval);
        }
        case SolverSpec::Kind::dtmdp: {
            DtmdpOptions options;
            options.layers = spec.layers;
            options.horizon = spec.horizon;
            options.tol = spec.tol;
            options.max_iter = spec.max_iter;
            options.tie_tol = spec.tie_tol;
            options.timing = config.timing;
            return std::make_unique<DtmdpPolicySource>(grid, field, config.reward, config.noise,
                                                       options);
        }
        case SolverSpec::Kind::atmdp: {
            AtmdpOptions options;
            options.tol = spec.tol;
            options.tie_tol = spec.tie_tol;
            options.timing = config.timing;
            return std::make_unique<AtmdpPolicySource>(grid, field, config.reward, config.noise,
                                                       options, spec.replan_interval);
        }
    }
    throw std::logic_error("unhandled solver kind");
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,x,y,state,action\n";
    for (const auto& s : trajectory.samples) {
        out += fmt_double(s.t);
        out += ',';
        out += fmt_double(s.position.x());
        out += ',';
        out += fmt_double(s.position.y());
        out += ',';
        out += std::to_string(s.state);
        out += ',';
        out += std::to_string(s.action);
        out += '\n';
    }
    return out;
}

ordered_json metrics_json(const std::string& solver, std::uint64_t seed, const RunMetrics& m) {
    ordered_json j;
    j["solver"] = solver;
    j["seed"] = seed;
    j["outcome"] = to_string(m.outcome);
    j["path_length"] = m.path_length;
    j["travel_time"] = m.travel_time;
    j["steps"] = m.steps;
    j["replan_count"] = m.replan_count;
    j["timing"] = {{"compute_seconds", m.compute_seconds},
                   {"linear_solve_seconds", m.linear_solve_seconds}};
    return j;
}

ordered_json stat_json(const Stat& s) {
    return {{"mean", s.mean}, {"std", s.stddev}, {"min", s.min}, {"max", s.max}};
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
}

}  // namespace

std::filesystem::path resolve_out_dir(const ExperimentConfig& config, const RunOptions& options) {
    if (options.out_dir) return *options.out_dir;
    if (const char* env = std::getenv("TVMDP_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return config.output_dir;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    const GridWorld grid = make_grid(config);
    const std::unique_ptr<TimeVaryingField> field = make_field(config.field);
    const int timeout =
        config.timeout_steps > 0 ? config.timeout_steps : default_timeout_steps(grid);

    struct Cell {
        const SolverSpec* spec;
        std::uint64_t seed;
        CellResult result;
        std::string traj_csv;
        std::string metrics_text;
    };
    std::vector<Cell> cells;
    for (const auto& spec : config.solvers)
        for (std::uint64_t seed : config.seeds)
            cells.push_back(Cell{&spec, seed + options.seed_offset, {}, {}, {}});

    const auto run_cell = [&](Cell& cell) {
        cell.result.solver = cell.spec->name;
        cell.result.seed = cell.seed;
        try {
            auto source = make_policy_source(grid, *field, config, *cell.spec);
            RolloutResult rr =
                rollout(*source, grid, *field, config.noise, config.start, 0.0, cell.seed, timeout);
            cell.result.metrics = rr.metrics;
            cell.traj_csv = trajectory_csv(rr.trajectory);
            cell.metrics_text =
                metrics_json(cell.spec->name, cell.seed, rr.metrics).dump(2) + "\n";
        } catch (const std::exception& e) {
            cell.result.failed = true;
            cell.result.error = e.what();
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || cells.size() <= 1) {
        for (auto& cell : cells) run_cell(cell);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int workers = std::min<std::size_t>(jobs, cells.size());
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                    run_cell(cells[i]);
            });
        for (auto& t : pool) t.join();
    }

    // Single-threaded collection: all files are written here, in matrix order.
    ExperimentResult result;
    result.out_dir = resolve_out_dir(config, options);
    std::filesystem::create_directories(result.out_dir);
    write_text(result.out_dir / "config.json", serialize_config(config));

    std::string comparison =
        "solver,seed,outcome,path_length,travel_time,steps,replan_count,"
        "compute_seconds,linear_solve_seconds\n";
    for (auto& cell : cells) {
        result.cells.push_back(cell.result);
        if (cell.result.failed) {
            result.all_completed = false;
            continue;
        }
        const std::string stem = cell.spec->name + "_s" + std::to_string(cell.seed);
        write_text(result.out_dir / ("traj_" + stem + ".csv"), cell.traj_csv);
        write_text(result.out_dir / ("metrics_" + stem + ".json"), cell.metrics_text);
        const auto& m = cell.result.metrics;
        comparison += cell.spec->name + "," + std::to_string(cell.seed) + "," +
                      to_string(m.outcome) + "," + fmt_double(m.path_length) + "," +
                      fmt_double(m.travel_time) + "," + std::to_string(m.steps) + "," +
                      std::to_string(m.replan_count) + "," + fmt_double(m.compute_seconds) + "," +
                      fmt_double(m.linear_solve_seconds) + "\n";
    }
    write_text(result.out_dir / "comparison.csv", comparison);

    ordered_json summary;
    summary["all_completed"] = result.all_completed;
    summary["solvers"] = ordered_json::object();
    for (const auto& spec : config.solvers) {
        std::vector<RunMetrics> runs;
        for (const auto& cell : result.cells)
            if (!cell.failed && cell.solver == spec.name) runs.push_back(cell.metrics);
        if (runs.empty()) continue;
        const MetricsSummary agg = aggregate(runs);
        ordered_json js;
        js["runs"] = agg.runs;
        js["reached_goal"] = agg.reached_goal;
        js["path_length"] = stat_json(agg.path_length);
        js["travel_time"] = stat_json(agg.travel_time);
        js["steps"] = stat_json(agg.steps);
        js["replans"] = stat_json(agg.replans);
        js["timing"] = {{"compute_seconds", stat_json(agg.compute_seconds)},
                        {"linear_solve_seconds", stat_json(agg.linear_solve_seconds)}};
        summary["solvers"][spec.name] = std::move(js);
    }
    summary["failures"] = ordered_json::array();
    for (const auto& cell : result.cells)
        if (cell.failed)
            summary["failures"].push_back(
                {{"solver", cell.solver}, {"seed", cell.seed}, {"error", cell.error}});
    write_text(result.out_dir / "summary.json", summary.dump(2) + "\n");

    return result;
}

std::vector<PolicyMapRow> build_policy_map(const ExperimentConfig& config,
                                           const SolverSpec& solver, int horizon_steps) {
    const GridWorld grid = make_grid(config);
    const std::unique_ptr<TimeVaryingField> field = make_field(config.field);
    if (horizon_steps <= 0) horizon_steps = 2 * (grid.width() + grid.height());

    // Solve, keeping the policy and per-state lookahead times.
    Policy policy;
    std::vector<double> times(static_cast<std::size_t>(grid.num_cells()), 0.0);
    switch (solver.kind) {
        case SolverSpec::Kind::tvmdp: {
            TvmdpOptions options;
            options.tol = solver.tol;
            options.max_iter = solver.max_iter;
            options.time_rel_tol = solver.time_rel_tol;
            options.tie_tol = solver.tie_tol;
            options.kolmogorov_synergistic = solver.kolmogorov_synergistic;
            options.timing = config.timing;
            TvmdpSolution solution =
                tvmdp_solve(grid, *field, config.reward, config.noise, config.start, 0.0, options);
            policy = std::move(solution.policy);
            times = std::move(solution.times.multi_hop);
            break;
        }
        case SolverSpec::Kind::atmdp: {
            AtmdpOptions options;
            options.tol = solver.tol;
            options.tie_tol = solver.tie_tol;
            options.timing = config.timing;
            AtmdpSolution solution =
                atmdp_solve(grid, *field, config.reward, config.noise, config.start, 0.0, options);
            policy = std::move(solution.policy);
            times = std::move(solution.lookahead_times);
            break;
        }
        case SolverSpec::Kind::mdp:
        case SolverSpec::Kind::dtmdp: {
            // Static solvers: solve at t0 and evaluate their policy's
            // Kolmogorov times for the funnel heights.
            const std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
            const PmfTable pmfs = build_pmf_table(grid, *field, config.noise, query);
            if (solver.kind == SolverSpec::Kind::mdp) {
                ViOptions options{solver.tol, solver.max_iter, solver.tie_tol};
                policy = mdp_value_iteration(grid, pmfs, config.reward, options).policy;
            } else {
                DtmdpOptions options;
                options.layers = solver.layers;
                options.horizon = solver.horizon;
                options.tol = solver.tol;
                options.max_iter = solver.max_iter;
                options.tie_tol = solver.tie_tol;
                options.timing = config.timing;
                policy = dtmdp_solve(grid, *field, config.reward, config.noise, 0.0, options)
                             .layer_policy(0);
            }
            const OneHopTable one_hop =
                build_one_hop_table(grid, *field, query, config.noise, config.timing);
            times = multi_hop_times(grid, config.start, policy_mixture(grid, pmfs, policy),
                                    one_hop, config.timing);
            break;
        }
    }

    // Forward occupation of the goal-absorbing policy chain from the start.
    std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
    for (std::size_t s = 0; s < query.size(); ++s) query[s] = std::min(times[s], kUnreachableTime);
    const PmfTable pmfs = build_pmf_table(grid, *field, config.noise, query);
    const std::vector<TransitionPmf> chain = policy_mixture(grid, pmfs, policy);

    std::vector<double> occupancy(static_cast<std::size_t>(grid.num_cells()), 0.0);
    std::vector<double> p(static_cast<std::size_t>(grid.num_cells()), 0.0);
    p[static_cast<std::size_t>(config.start)] = 1.0;
    for (int k = 0; k <= horizon_steps; ++k) {
        for (std::size_t s = 0; s < p.size(); ++s) occupancy[s] += p[s];
        std::vector<double> next(p.size(), 0.0);
        for (State s = 0; s < grid.num_cells(); ++s) {
            const double mass = p[static_cast<std::size_t>(s)];
            if (mass == 0.0 || grid.blocked(s)) continue;
            if (s == grid.goal()) {
                next[static_cast<std::size_t>(s)] += mass;  // absorbing
                continue;
            }
            for (const auto& e : chain[static_cast<std::size_t>(s)].entries)
                next[static_cast<std::size_t>(e.successor)] += mass * e.probability;
        }
        p.swap(next);
    }
    const double norm = 1.0 / static_cast<double>(horizon_steps + 1);

    std::vector<PolicyMapRow> rows;
    rows.reserve(static_cast<std::size_t>(grid.num_cells()));
    for (State s = 0; s < grid.num_cells(); ++s) {
        PolicyMapRow row;
        row.state = s;
        if (!grid.blocked(s)) {
            const Eigen::Vector2d c = grid.state_center(s);
            row.x = c.x();
            row.y = c.y();
            row.action_ids = policy.at(s);
            row.multi_hop_time = std::min(times[static_cast<std::size_t>(s)], kUnreachableTime);
            row.visit_likelihood = occupancy[static_cast<std::size_t>(s)] * norm;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_policy_map_csv(const std::filesystem::path& file, std::span<const PolicyMapRow> rows) {
    std::string out = "state,x,y,action_ids,multi_hop_time,visit_likelihood\n";
    for (const auto& r : rows) {
        out += std::to_string(r.state);
        out += ',';
        out += fmt_double(r.x);
        out += ',';
        out += fmt_double(r.y);
        out += ',';
        for (std::size_t i = 0; i < r.action_ids.size(); ++i) {
            if (i > 0) out += ';';
            out += std::to_string(r.action_ids[i]);
        }
        out += ',';
        out += fmt_double(r.multi_hop_time);
        out += ',';
        out += fmt_double(r.visit_likelihood);
        out += '\n';
    }
    write_text(file, out);
}

std::filesystem::path emit_policy_map(const std::filesystem::path& run_dir,
                                      const std::string& solver_label, int horizon_steps) {
    const ExperimentConfig config = load_config(run_dir / "config.json");
    const SolverSpec* chosen = nullptr;
    for (const auto& spec : config.solvers) {
        if (solver_label.empty() || spec.name == solver_label) {
            chosen = &spec;
            break;
        }
    }
    if (chosen == nullptr)
        throw std::runtime_error("emit_policy_map: no solver labeled \"" + solver_label +
                                 "\" in " + (run_dir / "config.json").string());
    const auto rows = build_policy_map(config, *chosen, horizon_steps);
    const auto file = run_dir / ("policy_map_" + chosen->name + ".csv");
    write_policy_map_csv(file, rows);
    return file;
}

}  // namespace tvmdp
