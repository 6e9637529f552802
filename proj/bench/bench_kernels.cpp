// Serial reference kernels vs the OpenMP ones, on grid sizes used by the
// washboard runs.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "wmqt/kernels.hpp"

namespace {

using wmqt::complex;
namespace k = wmqt::kernels;

std::vector<complex> test_wave(std::size_t n) {
    std::vector<complex> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        double const x = 0.01 * static_cast<double>(i);
        a[i] = std::polar(std::exp(-1e-4 * x * x), 0.7 * x);
    }
    return a;
}

struct StepData {
    std::vector<complex> psi;
    std::vector<complex> lhs;
    std::vector<complex> rhs;
    std::vector<complex> scratch;
    complex off;
    complex coupling;
    k::TridiagonalLU lu;

    explicit StepData(std::size_t n) : psi(test_wave(n)), lhs(n), rhs(n), scratch(n) {
        double const dt = 0.005;
        double const dx = 0.025;
        complex const I{0.0, 1.0};
        off = -I * dt / (4.0 * dx * dx);
        coupling = -off;
        for (std::size_t i = 0; i < n; ++i) {
            double const v = -2.0 * std::cos(0.025 * static_cast<double>(i));
            lhs[i] = 1.0 + I * dt / 2.0 * (1.0 / (dx * dx) + v);
            rhs[i] = 1.0 - I * dt / 2.0 * (1.0 / (dx * dx) + v);
        }
        lu.factorize(lhs, off);
    }
};

void BM_sum_abs2_serial(benchmark::State& s) {
    auto const a = test_wave(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        benchmark::DoNotOptimize(k::serial::sum_abs2(a));
    }
}

void BM_sum_abs2_parallel(benchmark::State& s) {
    auto const a = test_wave(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        benchmark::DoNotOptimize(k::sum_abs2(a));
    }
}

void BM_cn_rhs_serial(benchmark::State& s) {
    StepData d(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        k::serial::cn_rhs(d.psi, d.rhs, d.coupling, d.scratch);
        benchmark::ClobberMemory();
    }
}

void BM_cn_rhs_parallel(benchmark::State& s) {
    StepData d(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        k::cn_rhs(d.psi, d.rhs, d.coupling, d.scratch);
        benchmark::ClobberMemory();
    }
}

void BM_step_fused_serial(benchmark::State& s) {
    StepData d(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        k::serial::cn_step_fused(d.psi, d.rhs, d.coupling, d.lu, d.scratch);
        benchmark::ClobberMemory();
    }
}

void BM_step_split_parallel(benchmark::State& s) {
    StepData d(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        k::cn_rhs(d.psi, d.rhs, d.coupling, d.scratch);
        d.lu.solve(d.scratch);
        d.psi.swap(d.scratch);
        benchmark::ClobberMemory();
    }
}

void BM_factorize(benchmark::State& s) {
    StepData d(static_cast<std::size_t>(s.range(0)));
    for (auto _ : s) {
        d.lu.factorize(d.lhs, d.off);
        benchmark::ClobberMemory();
    }
}

}  // namespace

BENCHMARK(BM_sum_abs2_serial)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_sum_abs2_parallel)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_cn_rhs_serial)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_cn_rhs_parallel)->Arg(1 << 14)->Arg(1 << 16)->Arg(1 << 18);
BENCHMARK(BM_step_fused_serial)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_step_split_parallel)->Arg(1 << 14)->Arg(1 << 16);
BENCHMARK(BM_factorize)->Arg(1 << 14)->Arg(1 << 16);

BENCHMARK_MAIN();
