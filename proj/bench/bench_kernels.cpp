// Serial reference kernels against the OpenMP kernels, and the full stepping
// loop at the fault-scenario size.

#include "weaksync/agents.hpp"
#include "weaksync/generator.hpp"
#include "weaksync/graph.hpp"
#include "weaksync/kernels.hpp"
#include "weaksync/rng.hpp"
#include "weaksync/simulate.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace weaksync;

namespace {

kernels::RowMajorMatrix random_rowmajor(int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = rng.uniform(-1.0, 1.0);
    return kernels::RowMajorMatrix(m);
}

void bm_matvec_serial(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto m = random_rowmajor(n, 7);
    std::vector<double> x(n, 1.0), y(n);
    for (auto _ : state) {
        kernels::matvec_serial(m, x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}

void bm_matvec_parallel(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto m = random_rowmajor(n, 7);
    std::vector<double> x(n, 1.0), y(n);
    for (auto _ : state) {
        kernels::matvec_parallel(m, x.data(), y.data());
        benchmark::DoNotOptimize(y.data());
        benchmark::ClobberMemory();
    }
    state.SetItemsProcessed(state.iterations() * n * n);
}

NetworkSystem fault_network() {
    const auto g = generate_structured(fault_scenario_spec(), 1);
    std::vector<ClosedLoopAgent> agents(
        g.size(), direct_closed_loop(Eigen::MatrixXd::Zero(1, 1),
                                     -Eigen::MatrixXd::Ones(1, 1),
                                     Eigen::MatrixXd::Ones(1, 1),
                                     Eigen::MatrixXd::Ones(1, 1)));
    return assemble_network(std::move(agents), build_laplacian(g));
}

void bm_simulate(benchmark::State& state, kernels::ExecutionPolicy policy) {
    const NetworkSystem sys = fault_network();
    SimConfig cfg;
    cfg.step = 0.01;
    cfg.horizon = 10.0;
    cfg.policy = policy;
    Rng rng(3);
    cfg.initial_state = Eigen::VectorXd::NullaryExpr(
        sys.total_states, [&](Eigen::Index) { return rng.uniform(-5.0, 5.0); });
    for (auto _ : state) {
        const Trajectory tr = simulate(sys, cfg);
        benchmark::DoNotOptimize(tr.states.data());
    }
}

void bm_simulate_serial(benchmark::State& state) {
    bm_simulate(state, kernels::ExecutionPolicy::Serial);
}

void bm_simulate_parallel(benchmark::State& state) {
    bm_simulate(state, kernels::ExecutionPolicy::Parallel);
}

} // namespace

BENCHMARK(bm_matvec_serial)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_matvec_parallel)->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(bm_simulate_serial);
BENCHMARK(bm_simulate_parallel);

BENCHMARK_MAIN();
