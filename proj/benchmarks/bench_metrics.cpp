// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>

#include "stt/baselines.hpp"
#include "stt/geometry_channel.hpp"
#include "stt/metrics.hpp"

namespace {

void BM_SvdOracle(benchmark::State& state) {
    stt::SystemConfig cfg;
    stt::Rng rng(5);
    const stt::CMat h = stt::random_channel(cfg, rng).h;
    const int ns = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(stt::svd_oracle(h, ns, cfg.tx_power_bs, stt::noise_power(cfg)).s.data());
}
BENCHMARK(BM_SvdOracle)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WaterFilling(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    stt::RVec g(n);
    for (int i = 0; i < n; ++i) g(i) = std::pow(0.8, i);
    for (auto _ : state) benchmark::DoNotOptimize(stt::water_filling(g, 1.0, 0.1).mu);
}
BENCHMARK(BM_WaterFilling)->Arg(4)->Arg(16)->Arg(255);

void BM_EvaluateSe(benchmark::State& state) {
    stt::SystemConfig cfg;
    stt::Rng rng(6);
    const stt::CMat h = stt::random_channel(cfg, rng).h;
    const auto b = stt::svd_oracle(h, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(stt::evaluate_se(h, b.s, b.p, cfg.tx_power_bs, stt::noise_power(cfg)));
}
BENCHMARK(BM_EvaluateSe)->Unit(benchmark::kMicrosecond);

}  // namespace
