#include <benchmark/benchmark.h>

#include "qpm/conditional.hpp"

using namespace qpm;

namespace {

QuantumRandomVariable make_qrv(const SampleSpace& space, std::size_t d, std::uint64_t seed) {
    Rng rng(seed);
    QuantumRandomVariable psi;
    psi.space = space;
    psi.dim = d;
    for (std::size_t i = 0; i < space.size(); ++i) psi.values.push_back(random_psd(d, rng, 0.1));
    return psi;
}

void BM_spectral_decompose(benchmark::State& state) {
    const std::size_t d = state.range(0);
    Rng rng(1);
    const HermitianMatrix a = random_psd(d, rng, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(spectral_decompose(a));
}

void BM_geometric_mean(benchmark::State& state) {
    const std::size_t d = state.range(0);
    Rng rng(2);
    const HermitianMatrix a = random_psd(d, rng, 0.1);
    const HermitianMatrix b = random_psd(d, rng, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(geometric_mean(a, b));
}

void BM_expectation(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const SampleSpace space = SampleSpace::numbered(6);
    const QuantumMeasure nu = random_povm(space, d, 3);
    const QuantumRandomVariable psi = make_qrv(space, d, 4);
    for (auto _ : state) benchmark::DoNotOptimize(expectation(psi, nu));
}

void BM_rn_derivative(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const SampleSpace space = SampleSpace::numbered(6);
    const QuantumMeasure nu1 = random_povm(space, d, 5);
    const QuantumMeasure nu2 = random_povm(space, d, 6);
    for (auto _ : state) benchmark::DoNotOptimize(rn_derivative(nu2, nu1));
}

void BM_change_of_measure(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const SampleSpace space = SampleSpace::numbered(6);
    const QuantumMeasure nu1 = random_povm(space, d, 7);
    const QuantumMeasure nu2 = random_povm(space, d, 8);
    const QuantumRandomVariable psi = make_qrv(space, d, 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(change_of_measure_residual(psi, nu2, nu1));
}

void BM_bayes_residual(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const SampleSpace space = SampleSpace::numbered(6);
    const QuantumMeasure nu1 = random_povm(space, d, 10);
    const QuantumMeasure nu2 = random_povm(space, d, 11);
    const QuantumRandomVariable psi = make_qrv(space, d, 12);
    const Partition f = random_partition(space, 13, 3);
    for (auto _ : state) benchmark::DoNotOptimize(bayes_residual(psi, nu1, nu2, f, {}));
}

void BM_cesaro_projection(benchmark::State& state) {
    const std::size_t d = state.range(0);
    const SampleSpace space = SampleSpace::numbered(4);
    const QuantumMeasure nu = random_povm(space, d, 14);
    for (auto _ : state) benchmark::DoNotOptimize(cesaro_projection(nu));
}

BENCHMARK(BM_spectral_decompose)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_geometric_mean)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_expectation)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_rn_derivative)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(BM_change_of_measure)->Arg(2)->Arg(4)->Arg(6);
BENCHMARK(BM_bayes_residual)->Arg(2)->Arg(4);
BENCHMARK(BM_cesaro_projection)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
