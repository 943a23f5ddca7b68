#include <benchmark/benchmark.h>

#include <vector>

#include "gclt/analytics.hpp"
#include "gclt/functionals.hpp"
#include "gclt/kernels.hpp"
#include "gclt/localtime.hpp"
#include "gclt/rng.hpp"
#include "gclt/sampling.hpp"
#include "gclt/statistics.hpp"

namespace {

const gclt::Kernel& fbm() {
    static gclt::Kernel k = gclt::Kernel::fbm(0.75);
    return k;
}

void BM_counter_stream(benchmark::State& state) {
    gclt::CounterStream stream(1, 0, 0, 0);
    double acc = 0.0;
    for (auto _ : state) acc += stream.normal();
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_counter_stream);

void BM_gram_factor(benchmark::State& state) {
    gclt::TimeGrid grid(1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        gclt::GramFactor factor(fbm(), grid);
        benchmark::DoNotOptimize(factor.lower());
    }
}
BENCHMARK(BM_gram_factor)->Arg(64)->Arg(256);

void BM_sample_ensemble(benchmark::State& state) {
    gclt::TimeGrid grid(1.0, 128);
    for (auto _ : state) {
        gclt::PathEnsemble ens = gclt::sample_ensemble(fbm(), grid, 1, 100, 1);
        benchmark::DoNotOptimize(ens.data);
    }
}
BENCHMARK(BM_sample_ensemble);

void BM_additive_functional(benchmark::State& state) {
    gclt::TimeGrid grid(1.0, 128);
    auto [x1, x2] = gclt::sample_pair(fbm(), grid, grid, 1, 50, 1);
    gclt::TestFunction f = gclt::TestFunction::gaussian_diff(1, 1.0, 2.0);
    for (auto _ : state) {
        std::vector<double> v = gclt::additive_functional(
            x1, x2, f, 0.75, 64.0, 1.0, 1.0, gclt::FunctionalMode::Rescaled);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_additive_functional);

void BM_intersection_local_time(benchmark::State& state) {
    gclt::TimeGrid grid(1.0, 128);
    auto [x1, x2] = gclt::sample_pair(fbm(), grid, grid, 1, 50, 1);
    for (auto _ : state) {
        std::vector<double> v =
            gclt::intersection_local_time(x1, x2, 1.0, 1.0, 0.1);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_intersection_local_time);

void BM_lambda_m2_quadrature(benchmark::State& state) {
    gclt::Rectangle full{0.0, 1.0, 0.0, 1.0};
    for (auto _ : state) {
        gclt::MomentValue v = gclt::lambda_moment(
            fbm(), {full}, {2}, 1, gclt::MomentMethod::Quadrature);
        benchmark::DoNotOptimize(v.value);
    }
}
BENCHMARK(BM_lambda_m2_quadrature);

void BM_ks_two_sample(benchmark::State& state) {
    gclt::CounterStream stream(9, 0, 0, 0);
    std::vector<double> a(20000), b(20000);
    for (auto& v : a) v = stream.normal();
    for (auto& v : b) v = stream.normal();
    for (auto _ : state) {
        gclt::KsResult r = gclt::ks_two_sample(a, b);
        benchmark::DoNotOptimize(r.statistic);
    }
}
BENCHMARK(BM_ks_two_sample);

} // namespace

BENCHMARK_MAIN();
