// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "stt/geometry_channel.hpp"
#include "stt/wavenumber.hpp"

namespace {

stt::SystemConfig config(int n) {
    stt::SystemConfig cfg;
    cfg.n_bs_antennas = cfg.n_ue_antennas = n;
    return cfg;
}

void BM_RandomChannel(benchmark::State& state) {
    const stt::SystemConfig cfg = config(static_cast<int>(state.range(0)));
    stt::Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(stt::random_channel(cfg, rng).h.data());
}
BENCHMARK(BM_RandomChannel)->Arg(63)->Arg(127)->Arg(255)->Unit(benchmark::kMicrosecond);

void BM_ToWavenumber(benchmark::State& state) {
    const stt::SystemConfig cfg = config(static_cast<int>(state.range(0)));
    stt::Rng rng(2);
    const stt::CMat h = stt::random_channel(cfg, rng).h;
    const stt::Wtm wu = stt::build_wtm(stt::ue_array(cfg), cfg.wavelength());
    const stt::Wtm wb = stt::build_wtm(stt::bs_array(cfg), cfg.wavelength());
    for (auto _ : state) benchmark::DoNotOptimize(stt::to_wavenumber(h, wu, wb).data());
}
BENCHMARK(BM_ToWavenumber)->Arg(63)->Arg(127)->Arg(255)->Unit(benchmark::kMicrosecond);

}  // namespace
