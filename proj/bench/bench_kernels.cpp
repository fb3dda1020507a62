// Parallel kernels against their serial references.
#include "affine/dynamics.hpp"
#include "affine/kinematics.hpp"
#include "affine/quantum.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace affine;

std::vector<ReducedState> sweep_states(int count) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    std::vector<ReducedState> out;
    for (int k = 0; k < count; ++k) {
        ReducedState s(3);
        s.q << 1.0 + 0.1 * normal(rng), 0.0, -1.0 + 0.1 * normal(rng);
        for (double& v : s.p.array()) v = 0.3 * normal(rng);
        for (double& v : s.M.upper()) v = 0.3 * normal(rng);
        for (double& v : s.N.upper()) v = 0.3 * normal(rng);
        out.push_back(s);
    }
    return out;
}

std::vector<SpectralProblem> blocks() {
    std::vector<SpectralProblem> out;
    for (int twice_s = 0; twice_s <= 4; twice_s += 2) {
        for (int twice_j = 0; twice_j <= 4; twice_j += 2) {
            SpectralProblem p;
            p.n = 3;
            p.model.kind = ModelKind::MetrAff;
            p.model.I = 2.0;
            p.model.A = 1.0;
            p.mode = GridMode::Shape;
            p.axes = {Axis{-3.0, 3.0, 24}, Axis{-3.0, 3.0, 24}};
            p.potential.pairwise = PairwiseKind::Harmonic;
            p.potential.pair_k = 1.0;
            p.twice_alpha = twice_s;
            p.twice_beta = twice_j;
            out.push_back(p);
        }
    }
    return out;
}

void BM_TwoPolarBatch(benchmark::State& state) {
    const auto phis = random_configurations(3, 4096, 3, 1e6);
    for (auto _ : state) benchmark::DoNotOptimize(two_polar_batch(phis));
}

void BM_TwoPolarSerial(benchmark::State& state) {
    const auto phis = random_configurations(3, 4096, 3, 1e6);
    for (auto _ : state) benchmark::DoNotOptimize(two_polar_batch_serial(phis));
}

void BM_SweepParallel(benchmark::State& state) {
    ModelSpec model;
    model.B = 0.2;
    const auto states = sweep_states(16);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_sweep(model, PotentialSpec{}, states, 1.0));
}

void BM_SweepSerial(benchmark::State& state) {
    ModelSpec model;
    model.B = 0.2;
    const auto states = sweep_states(16);
    for (auto _ : state) benchmark::DoNotOptimize(integrate_sweep_serial(model, PotentialSpec{}, states, 1.0));
}

void BM_BlocksParallel(benchmark::State& state) {
    const auto problems = blocks();
    for (auto _ : state) benchmark::DoNotOptimize(solve_blocks(problems, 5, {.vectors = false}));
}

void BM_BlocksSerial(benchmark::State& state) {
    const auto problems = blocks();
    for (auto _ : state) benchmark::DoNotOptimize(solve_blocks_serial(problems, 5, {.vectors = false}));
}

}  // namespace

BENCHMARK(BM_TwoPolarBatch)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoPolarSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlocksParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BlocksSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
