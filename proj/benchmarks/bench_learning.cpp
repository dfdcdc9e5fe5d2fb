// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "stt/geometry_channel.hpp"
#include "stt/learner.hpp"
#include "stt/linalg.hpp"
#include "stt/wavenumber.hpp"

namespace {

// Full-size learner on a 65-column truncated WTM
void BM_GradStep(benchmark::State& state) {
    stt::SystemConfig cfg;
    const stt::Wtm w = stt::truncate(stt::build_wtm(stt::bs_array(cfg), cfg.wavelength()), -32, 32);
    stt::Rng rng(3);
    stt::MlpLearner l(w, {128, 64}, 0.005, stt::BeamConstraint::UnitModulus, rng);
    const stt::CVec y = stt::complex_noise(rng, 255, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(l.grad_step(y, stt::Side::DL).loss);
}
BENCHMARK(BM_GradStep)->Unit(benchmark::kMicrosecond);

void BM_Forward(benchmark::State& state) {
    stt::SystemConfig cfg;
    const stt::Wtm w = stt::truncate(stt::build_wtm(stt::bs_array(cfg), cfg.wavelength()), -32, 32);
    stt::Rng rng(4);
    stt::MlpLearner l(w, {128, 64}, 0.005, stt::BeamConstraint::UnitModulus, rng);
    const stt::CVec y = stt::complex_noise(rng, 255, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(l.forward(y).beam.data());
}
BENCHMARK(BM_Forward)->Unit(benchmark::kMicrosecond);

}  // namespace
