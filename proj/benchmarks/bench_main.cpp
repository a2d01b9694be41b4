#include <benchmark/benchmark.h>

#include "spreadhawkes/diagnostics.hpp"
#include "spreadhawkes/estimator.hpp"
#include "spreadhawkes/likelihood.hpp"
#include "spreadhawkes/simulator.hpp"

using namespace spreadhawkes;

namespace {

EventStream path(std::size_t n, ModelVariant variant = ModelVariant::Proposed) {
    SimConfig cfg;
    cfg.params = variant == ModelVariant::Proposed ? table1_truth(1) : embed_proposed(table1_truth(1), variant);
    cfg.variant = variant;
    cfg.n_events = n;
    cfg.seed = 42;
    return simulate(cfg).stream;
}

void BM_LogLikelihood(benchmark::State& state) {
    const auto stream = path(static_cast<std::size_t>(state.range(0)));
    const auto kernel = Kernel::compile(table1_truth(1), ModelVariant::Proposed);
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(stream, kernel).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihood)->Arg(1'000)->Arg(10'000)->Arg(100'000);

void BM_LogLikelihoodExtendedIV(benchmark::State& state) {
    const auto params = embed_proposed(table1_truth(1), ModelVariant::ExtendedIV);
    const auto stream = path(static_cast<std::size_t>(state.range(0)), ModelVariant::ExtendedIV);
    const auto kernel = Kernel::compile(params, ModelVariant::ExtendedIV);
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(stream, kernel).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogLikelihoodExtendedIV)->Arg(10'000);

void BM_Simulate(benchmark::State& state) {
    SimConfig cfg;
    cfg.params = table1_truth(1);
    cfg.n_events = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        ++cfg.seed;
        benchmark::DoNotOptimize(simulate(cfg).stream.events.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10'000)->Arg(100'000);

void BM_Residuals(benchmark::State& state) {
    const auto stream = path(10'000);
    for (auto _ : state) benchmark::DoNotOptimize(residuals(stream, table1_truth(1), ModelVariant::Proposed));
}
BENCHMARK(BM_Residuals);

void BM_Fit(benchmark::State& state) {
    const auto stream = path(static_cast<std::size_t>(state.range(0)));
    FitConfig cfg;
    cfg.restarts = 1;
    cfg.compute_standard_errors = false;
    for (auto _ : state) benchmark::DoNotOptimize(fit(stream, cfg).log_likelihood);
}
BENCHMARK(BM_Fit)->Arg(10'000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
