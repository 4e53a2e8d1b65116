#include "tvmdp/executors.hpp"
#include "tvmdp/sim.hpp"
#include "tvmdp/solvers.hpp"
#include "tvmdp/timing.hpp"

#include <benchmark/benchmark.h>

using namespace tvmdp;

namespace {

GridWorld make_square(int n) {
    GridSpec spec;
    spec.width = n;
    spec.height = n;
    spec.goal = n * n - 1;
    return GridWorld(spec);
}

NoiseConfig default_noise() {
    NoiseConfig noise;
    noise.sigma_action = 0.1;
    noise.sigma_disturbance = 0.2;
    noise.duration = 1.0;
    return noise;
}

}  // namespace

static void BM_DiscretizePmf(benchmark::State& state) {
    const GridWorld grid = make_square(10);
    const UniformField drift({0.2, 0.1});
    const NoiseConfig noise = default_noise();
    for (auto _ : state)
        benchmark::DoNotOptimize(action_pmf(grid, 55, 1, drift, 0.0, noise));
}
BENCHMARK(BM_DiscretizePmf);

static void BM_BuildPmfTable(benchmark::State& state) {
    const GridWorld grid = make_square(static_cast<int>(state.range(0)));
    const UniformField drift({0.2, 0.1});
    const NoiseConfig noise = default_noise();
    const std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_pmf_table(grid, drift, noise, query));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_BuildPmfTable)->Arg(10)->Arg(20)->Arg(32)->Complexity();

static void BM_OneHopTable(benchmark::State& state) {
    const GridWorld grid = make_square(static_cast<int>(state.range(0)));
    const VortexField vortex({5.0, 5.0}, 0.1, 0.2, 2.0);
    const NoiseConfig noise = default_noise();
    const std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_one_hop_table(grid, vortex, query, noise));
}
BENCHMARK(BM_OneHopTable)->Arg(10)->Arg(32);

static void BM_KolmogorovMultiHop(benchmark::State& state) {
    const GridWorld grid = make_square(static_cast<int>(state.range(0)));
    const UniformField drift({0.2, 0.1});
    const NoiseConfig noise = default_noise();
    const std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
    const PmfTable table = build_pmf_table(grid, drift, noise, query);
    const MdpSolution mdp = mdp_value_iteration(grid, table, {}, {1e-6, 10000, 1e-9});
    const auto mixtures = policy_mixture(grid, table, mdp.policy);
    const OneHopTable hops = build_one_hop_table(grid, drift, query, noise);
    std::unordered_map<State, Eigen::VectorXd> warm;
    for (auto _ : state)
        benchmark::DoNotOptimize(multi_hop_times(grid, 0, mixtures, hops, {}, nullptr, &warm));
    state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BM_KolmogorovMultiHop)->Unit(benchmark::kMillisecond)->Arg(8)->Arg(10)->Arg(16)->Complexity();

static void BM_MdpValueIteration(benchmark::State& state) {
    const GridWorld grid = make_square(10);
    const UniformField drift({0.2, 0.1});
    const NoiseConfig noise = default_noise();
    const std::vector<double> query(static_cast<std::size_t>(grid.num_cells()), 0.0);
    const PmfTable table = build_pmf_table(grid, drift, noise, query);
    for (auto _ : state)
        benchmark::DoNotOptimize(mdp_value_iteration(grid, table, {}, {1e-6, 10000, 1e-9}));
}
BENCHMARK(BM_MdpValueIteration)->Unit(benchmark::kMillisecond);

static void BM_TvmdpSolve(benchmark::State& state) {
    const GridWorld grid = make_square(static_cast<int>(state.range(0)));
    const VortexField vortex({5.0, 5.0}, 0.12, 0.15, 2.0);
    const NoiseConfig noise = default_noise();
    RewardModel reward;
    reward.discount = 0.9;
    TvmdpOptions options;
    options.tol = 0.1;
    options.max_iter = 200;
    for (auto _ : state)
        benchmark::DoNotOptimize(tvmdp_solve(grid, vortex, reward, noise, 0, 0.0, options));
}
BENCHMARK(BM_TvmdpSolve)->Unit(benchmark::kMillisecond)->Arg(10);

static void BM_Rollout(benchmark::State& state) {
    const GridWorld grid = make_square(10);
    const VortexField vortex({5.0, 5.0}, 0.12, 0.15, 2.0);
    const NoiseConfig noise = default_noise();
    MdpPolicySource policy(grid, vortex, {}, noise);
    policy.plan(0, 0.0);
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(rollout(policy, grid, vortex, noise, 0, 0.0, ++seed, 0));
}
BENCHMARK(BM_Rollout);

BENCHMARK_MAIN();
