// Microbenchmarks for the counting kernels.
#include <benchmark/benchmark.h>

#include "fracdim/dimension.hpp"
#include "fracdim/functions.hpp"
#include "fracdim/geometry.hpp"
#include "fracdim/rng.hpp"

namespace {

fracdim::IfsSpec cantor_spec() {
    return {1, 2, 1.0 / 3.0, {{0.0}, {2.0 / 3.0}}};
}

fracdim::SampledMeasure random_cloud(std::size_t count, int dim) {
    fracdim::SampledMeasure mu;
    mu.ambient_dim = dim;
    mu.total_mass = 1.0;
    mu.coords.resize(count * static_cast<std::size_t>(dim));
    mu.weights.assign(count, 1.0 / static_cast<double>(count));
    fracdim::SplitMix64 rng(99);
    for (auto& c : mu.coords) c = rng.next_double();
    return mu;
}

void BM_GenerateAttractor(benchmark::State& state) {
    const int level = static_cast<int>(state.range(0));
    const auto spec = cantor_spec();
    for (auto _ : state)
        benchmark::DoNotOptimize(fracdim::generate_attractor(spec, level, 1 << 22));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << level));
}
BENCHMARK(BM_GenerateAttractor)->Arg(12)->Arg(16)->Arg(20);

void BM_TallyBoxes(benchmark::State& state) {
    const auto mu = random_cloud(static_cast<std::size_t>(state.range(0)),
                                 static_cast<int>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(fracdim::tally_boxes(mu, 2, 10));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 9);
}
BENCHMARK(BM_TallyBoxes)->Args({1 << 14, 1})->Args({1 << 17, 1})->Args({1 << 17, 2})->Args({1 << 17, 3});

void BM_TallyBoxesThreaded(benchmark::State& state) {
    const auto mu = random_cloud(std::size_t{1} << 20, 2);
    const int threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fracdim::tally_boxes(mu, 2, 10, threads));
    state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << 20) * 9);
}
BENCHMARK(BM_TallyBoxesThreaded)->Arg(1)->Arg(2)->Arg(4);

void BM_CorrelationIntegral(benchmark::State& state) {
    const auto mu = fracdim::generate_attractor(cantor_spec(), 14);
    std::vector<double> ts;
    for (double t = 0.05; t <= 0.951; t += 0.05) ts.push_back(t);
    const auto pairs = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(fracdim::correlation_integral(mu, ts, pairs, 7));
    state.SetItemsProcessed(state.iterations() * pairs);
}
BENCHMARK(BM_CorrelationIntegral)->Arg(100000)->Arg(1000000);

void BM_WeierstrassEval(benchmark::State& state) {
    fracdim::WeierstrassParams params;
    params.s = 0.5;
    params.rho = 2.0;
    params.truncation = static_cast<int>(state.range(0));
    params.phases = fracdim::random_phases(1, params.truncation, 3);
    const auto mu = fracdim::generate_attractor(cantor_spec(), 12);
    for (auto _ : state) {
        double acc = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            acc += fracdim::weierstrass_eval(params, mu.point(i)).first;
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mu.size()));
}
BENCHMARK(BM_WeierstrassEval)->Arg(40)->Arg(160);

void BM_BesovSynthesize(benchmark::State& state) {
    const auto series = fracdim::make_besov_coefficients(cantor_spec(), 0.5,
                                                         static_cast<int>(state.range(0)),
                                                         fracdim::BesovMode::deterministic, 1);
    const fracdim::BesovEvaluator eval(series);
    const auto mu = fracdim::generate_attractor(cantor_spec(), 12);
    for (auto _ : state) {
        double acc = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i) acc += eval(mu.point(i));
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mu.size()));
}
BENCHMARK(BM_BesovSynthesize)->Arg(8)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
