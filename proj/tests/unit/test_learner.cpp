// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "stt/learner.hpp"
#include "stt/training.hpp"
#include "test_support.hpp"

using namespace stt;
using stt::testing::finite_difference_gradient;
using stt::testing::max_relative_error;
using stt::testing::random_gradient_instance;

namespace {

Wtm default_system_truncated(int half) {
    SystemConfig cfg;
    const Wtm full = build_wtm(bs_array(cfg), cfg.wavelength());
    return truncate(full, -half, half);
}

Wtm toy_wtm(int n) {
    SystemConfig c = stt::testing::toy_config(n, n, 1.0);
    return build_wtm(bs_array(c), c.wavelength());
}

}  // namespace

TEST(BeamLoss, Examples) {
    CVec ones = CVec::Ones(2);
    EXPECT_NEAR(beam_loss(ones, ones, Side::DL), std::sqrt(2.0), 1e-15);
    CVec y(2);
    y << 1.0, -1.0;
    EXPECT_NEAR(beam_loss(ones, y, Side::DL), 0.0, 1e-15);
    EXPECT_THROW(beam_loss(ones, CVec::Ones(3), Side::DL), DomainError);

    // conjugation is what separates the two sides
    CVec b(2), v(2);
    b << 1.0, cplx(0, 1);
    v << 1.0, cplx(0, -1);
    EXPECT_NEAR(beam_loss(b, v, Side::UL), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(beam_loss(b, v, Side::DL), 0.0, 1e-15);
}

TEST(BeamLoss, ScaleInvariant) {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const CVec raw = complex_noise(rng, 6, 1.0);
        const CVec y = complex_noise(rng, 6, 1.0);
        for (auto c : {BeamConstraint::UnitModulus, BeamConstraint::UnitNorm})
            for (auto side : {Side::DL, Side::UL})
                EXPECT_NEAR(beam_loss(raw, y, side, c), beam_loss(CVec(3.7 * raw), y, side, c), 1e-12);
    }
}

TEST(BeamLoss, StationaryAtMatchedPhases) {
    Rng rng(9);
    const CVec y = complex_noise(rng, 7, 1.0);
    const double h = 1e-6;
    for (int i = 0; i < y.size(); ++i) {
        CVec up = y, dn = y;
        up(i) *= std::polar(1.0, h);
        dn(i) *= std::polar(1.0, -h);
        const double d = (beam_loss(up, y, Side::DL) - beam_loss(dn, y, Side::DL)) / (2 * h);
        EXPECT_NEAR(d, 0.0, 1e-6);
    }
}

TEST(NormalizeBeam, Constraints) {
    CVec raw(3);
    raw << cplx(2, 0), cplx(0, 0), cplx(0, -5);
    const CVec um = normalize_beam(raw, BeamConstraint::UnitModulus);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(um(i)), 1.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(um(1).real(), 1.0 / std::sqrt(3.0), 1e-15);  // zero entry takes phase 0
    const CVec un = normalize_beam(raw, BeamConstraint::UnitNorm);
    EXPECT_NEAR(un.norm(), 1.0, 1e-15);
    EXPECT_NEAR(std::arg(un(2)), -kPi / 2, 1e-15);
}

TEST(MlpLearner, ParameterCountDefaultSystem) {
    Rng rng(1);
    MlpLearner l(default_system_truncated(32), {128, 64}, 0.005, BeamConstraint::UnitModulus, rng);
    EXPECT_EQ(l.wtm().cols(), 65);
    EXPECT_EQ(l.parameter_count(), 82114);
    EXPECT_EQ(l.layer_dims(), (std::vector<int>{510, 128, 64, 130}));
    EXPECT_DOUBLE_EQ(TrainingConfig{}.learning_rate, 0.005);
}

TEST(MlpLearner, InitIsSeededAndBounded) {
    Rng a(5), b(5);
    MlpLearner la(toy_wtm(7), {16, 8}, 0.005, BeamConstraint::UnitModulus, a);
    MlpLearner lb(toy_wtm(7), {16, 8}, 0.005, BeamConstraint::UnitModulus, b);
    EXPECT_EQ(la.parameters(), lb.parameters());
    const auto& d = la.layer_dims();
    int off = 0;
    for (size_t k = 0; k + 1 < d.size(); ++k) {
        const int nw = d[k] * d[k + 1];
        const double bound = std::sqrt(6.0 / (d[k] + d[k + 1]));
        EXPECT_LE(la.parameters().segment(off, nw).cwiseAbs().maxCoeff(), bound);
        EXPECT_EQ(la.parameters().segment(off + nw, d[k + 1]).cwiseAbs().maxCoeff(), 0.0);
        off += nw + d[k + 1];
    }
    EXPECT_EQ(off, la.parameter_count());
    EXPECT_THROW(MlpLearner(toy_wtm(7), {0}, 0.005, BeamConstraint::UnitModulus, a), DomainError);
    EXPECT_THROW(MlpLearner(toy_wtm(7), {4}, 0.0, BeamConstraint::UnitModulus, a), DomainError);
}

TEST(MlpLearner, ForwardContract) {
    Rng rng(6);
    const Wtm w = truncate(toy_wtm(7), -2, 1);
    MlpLearner l(w, {16, 8}, 0.005, BeamConstraint::UnitModulus, rng);

    const auto z = l.forward(CVec::Zero(7));
    EXPECT_EQ(z.beam_raw.cwiseAbs().maxCoeff(), 0.0);
    for (int i = 0; i < 7; ++i) EXPECT_NEAR(std::abs(z.beam(i)), 1.0 / std::sqrt(7.0), 1e-15);

    for (int t = 0; t < 10; ++t) {
        const auto f = l.forward(complex_noise(rng, 7, 1.0));
        for (int i = 0; i < 7; ++i) EXPECT_NEAR(std::abs(f.beam(i)), 1.0 / std::sqrt(7.0), 1e-15);
        // raw beam lies in the span of the truncated columns
        const CVec coef = w.matrix.colPivHouseholderQr().solve(f.beam_raw);
        EXPECT_LT((w.matrix * coef - f.beam_raw).norm(), 1e-10 * std::max(1.0, f.beam_raw.norm()));
    }
    EXPECT_THROW(l.forward(CVec::Zero(5)), DomainError);
}

TEST(MlpLearner, GradientMatchesFiniteDifferences) {
    Rng rng(2024);
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        auto inst = random_gradient_instance(rng);
        // central differences straddling a ReLU kink are not derivatives
        if (inst.learner.min_abs_preactivation(inst.y) < 1e-3) continue;
        double loss = 0.0;
        const RVec g = inst.learner.gradient(inst.y, inst.side, &loss);
        EXPECT_NEAR(loss, inst.learner.loss(inst.y, inst.side), 1e-14);
        const RVec fd = finite_difference_gradient(inst.learner, inst.y, inst.side, 1e-5);
        EXPECT_LT(max_relative_error(g, fd), 1e-4) << trial;
        ++checked;
    }
    EXPECT_GE(checked, 80);
}

TEST(MlpLearner, AscentOnFixedPilot) {
    Rng rng(31);
    int improved = 0;
    const int trials = 40;
    for (int trial = 0; trial < trials; ++trial) {
        const Wtm w = truncate(toy_wtm(7), -2, 2);
        MlpLearner l(w, {32, 16}, 0.005, BeamConstraint::UnitModulus, rng);
        const CVec y = complex_noise(rng, 7, 1.0);
        const double first = l.loss(y, Side::DL);
        double best = 0.0;
        for (int s = 0; s < 50; ++s) best = std::max(best, l.grad_step(y, Side::DL).loss);
        const double last = l.loss(y, Side::DL);
        // the matched filter bound sum|y| / sqrt(M) is never exceeded
        EXPECT_LE(best, y.cwiseAbs().sum() / std::sqrt(7.0) + 1e-12);
        EXPECT_EQ(l.step_count(), 50);
        improved += last > 1.1 * first;
    }
    EXPECT_GE(improved, static_cast<int>(0.95 * trials));
}

TEST(MlpLearner, LastLayerScaleInvariance) {
    Rng rng(12);
    const Wtm w = truncate(toy_wtm(7), -2, 2);
    MlpLearner l(w, {16, 8}, 0.005, BeamConstraint::UnitModulus, rng);
    const CVec y = complex_noise(rng, 7, 1.0);
    const double base = l.loss(y, Side::UL);
    // last layer weights sit just before the final bias block; biases start at zero
    const int out = l.layer_dims().back();
    const int in = l.layer_dims()[l.layer_dims().size() - 2];
    RVec p = l.parameters();
    const int w0 = static_cast<int>(p.size()) - out - out * in;
    for (int i = w0; i < w0 + out * in; ++i) p(i) *= 13.5;
    l.set_parameters(p);
    EXPECT_NEAR(l.loss(y, Side::UL), base, 1e-10);
}

TEST(MlpLearner, DeterministicTrajectory) {
    Rng a(77), b(77), ya(3), yb(3);
    const Wtm w = truncate(toy_wtm(7), -1, 2);
    MlpLearner la(w, {16, 8}, 0.005, BeamConstraint::UnitNorm, a);
    MlpLearner lb(w, {16, 8}, 0.005, BeamConstraint::UnitNorm, b);
    for (int s = 0; s < 30; ++s) {
        la.grad_step(complex_noise(ya, 7, 1.0), s % 2 ? Side::UL : Side::DL);
        lb.grad_step(complex_noise(yb, 7, 1.0), s % 2 ? Side::UL : Side::DL);
    }
    EXPECT_EQ(la.parameters(), lb.parameters());
}

TEST(MlpLearner, DecayLearningRate) {
    Rng rng(1);
    MlpLearner l(toy_wtm(5), {4}, 0.005, BeamConstraint::UnitModulus, rng);
    l.decay_learning_rate(0.99);
    EXPECT_NEAR(l.learning_rate(), 0.00495, 1e-15);
    l.decay_learning_rate(1.0);
    EXPECT_NEAR(l.learning_rate(), 0.00495, 1e-15);
    for (int i = 0; i < 1000; ++i) l.decay_learning_rate(0.99);
    EXPECT_DOUBLE_EQ(l.learning_rate(), 0.001);
    EXPECT_THROW(l.decay_learning_rate(0.0), DomainError);
    EXPECT_THROW(l.decay_learning_rate(1.5), DomainError);
}

TEST(MlpLearner, SnapshotRoundTrip) {
    Rng rng(4);
    const Wtm w = truncate(toy_wtm(7), -2, 2);
    MlpLearner l(w, {12, 6}, 0.005, BeamConstraint::UnitModulus, rng);
    const CVec y = complex_noise(rng, 7, 1.0);
    for (int s = 0; s < 5; ++s) l.grad_step(y, Side::DL);
    const MlpLearner r = MlpLearner::from_json(l.to_json());
    EXPECT_EQ(r.parameters(), l.parameters());
    EXPECT_EQ(r.layer_dims(), l.layer_dims());
    EXPECT_EQ(r.learning_rate(), l.learning_rate());
    EXPECT_TRUE(r.forward(y).beam.isApprox(l.forward(y).beam, 1e-15));
    EXPECT_THROW(MlpLearner::from_json("{\"version\": 99}"), std::exception);
}
