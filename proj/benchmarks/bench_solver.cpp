// Microbenchmarks for the hot paths: residual/Jacobian assembly, the
// regularized normal-equation solve, and a full end-to-end run.

#include "bilevel_lm/jacobian.hpp"
#include "bilevel_lm/problem_library.hpp"
#include "bilevel_lm/residual.hpp"
#include "bilevel_lm/solver.hpp"

#include <benchmark/benchmark.h>

using namespace bilevel_lm;

namespace {

Iterate start_iterate(const BilevelProblem& prob) { return initialize_iterate(prob); }

void BM_AssembleResidual(benchmark::State& state) {
    const BilevelProblem prob = get_problem("AllendeStill2013");
    const Iterate z = start_iterate(prob);
    const PenaltySmoothingState ps{1.0, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_residual(prob, z, ps));
    }
}
BENCHMARK(BM_AssembleResidual);

void BM_AssembleJacobian(benchmark::State& state) {
    const BilevelProblem prob = get_problem("AllendeStill2013");
    const Iterate z = start_iterate(prob);
    const PenaltySmoothingState ps{1.0, 1e-3};
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_jacobian(prob, z, ps));
    }
}
BENCHMARK(BM_AssembleJacobian);

void BM_LmDirection(benchmark::State& state) {
    const BilevelProblem prob = get_problem("AllendeStill2013");
    const Iterate z = start_iterate(prob);
    const PenaltySmoothingState ps{1.0, 1e-3};
    const Mat J = assemble_jacobian(prob, z, ps);
    const Vec r = assemble_residual(prob, z, ps);
    for (auto _ : state) {
        benchmark::DoNotOptimize(lm_direction(J, r, r.norm()));
    }
}
BENCHMARK(BM_LmDirection);

void BM_SolveFull(benchmark::State& state) {
    const BilevelProblem prob = get_problem("LampariellloSagratella2017Ex33");
    SolverConfig config;
    config.max_iters = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve(prob, config));
    }
}
BENCHMARK(BM_SolveFull)->Arg(100)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
