// Serial reference vs OpenMP kernel for lagged cross-correlation, sigma
// sweeps and multi-case comms runs.

#include "glsync/comms.hpp"
#include "glsync/sync.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace glsync;

namespace {

struct Series {
    std::vector<double> xs, ys;
};

const Series& series() {
    static const Series s = [] {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        Series out;
        out.xs.resize(38000);
        out.ys.resize(38000);
        for (std::size_t i = 0; i < out.xs.size(); ++i) {
            out.xs[i] = g(rng);
            out.ys[i] = -0.8 * out.xs[i] + 0.2 * g(rng);
        }
        return out;
    }();
    return s;
}

const std::vector<SigmaVec>& sigmas() {
    static const auto s = sigma_grid(SweepPreset::figure, -1, 1, 0.2);
    return s;
}

const std::vector<CaseRequest> kCases{{1, Regime::positive}, {1, Regime::zero}, {1, Regime::negative},
                                      {2, Regime::zero},     {3, Regime::zero}, {4, Regime::zero}};

void BM_xcorr_serial(benchmark::State& st) {
    const auto& s = series();
    for (auto _ : st) benchmark::DoNotOptimize(cross_correlation_serial(s.xs, s.ys, static_cast<int>(st.range(0))));
}

void BM_xcorr_omp(benchmark::State& st) {
    const auto& s = series();
    for (auto _ : st) benchmark::DoNotOptimize(cross_correlation(s.xs, s.ys, static_cast<int>(st.range(0))));
}

void BM_sweep_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(sweep_sigma_serial(SimConfig{}, sigmas()));
}

void BM_sweep_omp(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(sweep_sigma(SimConfig{}, sigmas()));
}

void BM_cases_serial(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(run_cases_serial(kCases));
}

void BM_cases_omp(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(run_cases(kCases));
}

} // namespace

BENCHMARK(BM_xcorr_serial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_xcorr_omp)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_omp)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_cases_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_cases_omp)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
