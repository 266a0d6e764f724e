//
// microbenchmarks for the hot paths: row thresholding, a single
// denoising sweep, noise-scale estimation, initialization, and the full
// pipeline, all at desk scale
//

#include "slrd/denoiser.hpp"
#include "slrd/experiments.hpp"
#include "slrd/initialization.hpp"
#include "slrd/thresholding.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace slrd;

Instance desk_instance()
{
    GeneratorSpec spec = bench_base_spec(BenchScale::Desk);
    spec.seed = 1;
    return generate_instance(spec);
}

void BM_ThresholdRows(benchmark::State& state)
{
    const Instance instance = desk_instance();
    const Matrix V0 = initialize(instance.observed, 1.0, InitConfig{}).V0;
    const Matrix product = instance.observed * V0;
    ThresholdSpec spec;
    spec.rule = static_cast<ThresholdRule>(state.range(0));
    const double level = compute_gamma(product.cols(), 3.0, instance.observed.rows());
    for (auto _ : state)
        benchmark::DoNotOptimize(threshold_rows(product, level, spec));
}

void BM_DenoiseStep(benchmark::State& state)
{
    const Instance instance = desk_instance();
    DenoiseConfig config;
    config.rank = 5;
    config.sigma = 1.0;
    config.gamma_u = compute_gamma(5, 3.0, instance.observed.rows());
    config.gamma_v = config.gamma_u;
    const Matrix V0 = initialize(instance.observed, 1.0, InitConfig{}).V0;
    for (auto _ : state)
        benchmark::DoNotOptimize(denoise_step(instance.observed, V0, config));
}

void BM_EstimateSigma(benchmark::State& state)
{
    const Instance instance = desk_instance();
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_sigma(instance.observed));
}

void BM_Initialize(benchmark::State& state)
{
    const Instance instance = desk_instance();
    for (auto _ : state)
        benchmark::DoNotOptimize(initialize(instance.observed, 1.0, InitConfig{}));
}

void BM_Pipeline(benchmark::State& state)
{
    const Instance instance = desk_instance();
    PipelineOptions options;
    options.beta = 3.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(auto_denoise(instance.observed, options));
}

} // namespace

BENCHMARK(BM_ThresholdRows)
    ->Arg(static_cast<int>(ThresholdRule::Hard))
    ->Arg(static_cast<int>(ThresholdRule::Soft))
    ->Arg(static_cast<int>(ThresholdRule::Scad))
    ->Arg(static_cast<int>(ThresholdRule::Mcp));
BENCHMARK(BM_DenoiseStep);
BENCHMARK(BM_EstimateSigma);
BENCHMARK(BM_Initialize);
BENCHMARK(BM_Pipeline);

BENCHMARK_MAIN();
