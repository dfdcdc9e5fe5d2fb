// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "stt/baselines.hpp"
#include "stt/experiment.hpp"
#include "stt/metrics.hpp"
#include "stt/training.hpp"
#include "test_support.hpp"

using namespace stt;
using stt::testing::random_cmat;

namespace {

CMat dft(int n) {
    CMat m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = std::polar(1.0 / std::sqrt(n), 2 * kPi * r * c / n);
    return m;
}

Learners toy_learners(int m, int n, const TrainingConfig& tc, Rng& rng) {
    return {MlpLearner(Wtm::from_matrix(dft(m)), tc.hidden, tc.learning_rate, tc.constraint(), rng),
            MlpLearner(Wtm::from_matrix(dft(n)), tc.hidden, tc.learning_rate, tc.constraint(), rng)};
}

// Dominant far-field steering pair plus a weak Gaussian part.
CMat los_like_toy(Rng& rng, int m, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double ua = u(rng), ub = u(rng);
    CVec a(m), b(n);
    for (int i = 0; i < m; ++i) a(i) = std::polar(1.0 / std::sqrt(m), kPi * i * ua);
    for (int i = 0; i < n; ++i) b(i) = std::polar(1.0 / std::sqrt(n), kPi * i * ub);
    return 4.0 * a * b.transpose() + 0.3 * random_cmat(rng, m, n);
}

double sigma_max(const CMat& h) { return Eigen::BDCSVD<CMat>(h).singularValues()(0); }

}  // namespace

TEST(PingPong, NoiselessPilotsAreExact) {
    Rng rng(1);
    const CMat h = random_cmat(rng, 5, 7);
    PingPongSim sim(h, 0.0, 4.0, 9.0, 3);
    const CVec p = unit_norm(complex_noise(rng, 7, 1.0));
    const CVec s = unit_norm(complex_noise(rng, 5, 1.0));
    EXPECT_LT((sim.dl_pilot(p) - 2.0 * h * p).norm(), 1e-14);
    EXPECT_LT((sim.ul_pilot(s) - 3.0 * h.transpose() * s.conjugate()).norm(), 1e-14);
    EXPECT_EQ(sim.dl_count(), 1);
    EXPECT_EQ(sim.ul_count(), 1);
    EXPECT_EQ(sim.rounds(), 1);

    // reciprocity of the utility seen from both ends
    const cplx dl = s.dot(h * p);
    const cplx ul = (p.transpose() * h.transpose() * s.conjugate()).value();
    EXPECT_NEAR(std::abs(dl), std::abs(ul), 1e-14);
}

TEST(PingPong, BlockPilotsSplitPower) {
    Rng rng(2);
    const CMat h = random_cmat(rng, 5, 5);
    PingPongSim sim(h, 0.0, 8.0, 8.0, 3);
    const CMat p = orthonormalize(random_cmat(rng, 5, 2));
    EXPECT_LT((sim.dl_block(p) - 2.0 * h * p).norm(), 1e-13);
    EXPECT_LT((sim.ul_block(p) - 2.0 * h.transpose() * p.conjugate()).norm(), 1e-13);
}

TEST(PingPong, NoiseStatistics) {
    Rng rng(3);
    const CMat h = random_cmat(rng, 6, 4);
    const double s2 = 0.25;
    PingPongSim sim(h, s2, 1.0, 1.0, 99);
    const CVec p = unit_norm(complex_noise(rng, 4, 1.0));
    const CVec s = unit_norm(complex_noise(rng, 6, 1.0));
    double e_dl = 0.0, e_ul = 0.0;
    const int draws = 1000;
    for (int i = 0; i < draws; ++i) {
        e_dl += (sim.dl_pilot(p) - h * p).squaredNorm() / draws;
        e_ul += (sim.ul_pilot(s) - h.transpose() * s.conjugate()).squaredNorm() / draws;
    }
    EXPECT_NEAR(e_dl / (6 * s2), 1.0, 0.05);
    EXPECT_NEAR(e_ul / (4 * s2), 1.0, 0.05);

    PingPongSim a(h, s2, 1.0, 1.0, 5), b(h, s2, 1.0, 1.0, 5);
    EXPECT_EQ(a.dl_pilot(p), b.dl_pilot(p));
    EXPECT_EQ(a.ul_pilot(s), b.ul_pilot(s));
}

TEST(Deflate, Examples) {
    Rng rng(4);
    const int m = 6;
    const CMat q = orthonormalize(random_cmat(rng, m, 3));
    const CMat r1 = deflate(CMat::Identity(m, m), q.col(0));
    EXPECT_LT((r1 * q.col(0)).norm(), 1e-14);
    EXPECT_LT((r1 * q.col(1) - q.col(1)).norm(), 1e-14);
    const CMat r3 = deflate(deflate(r1, q.col(1)), q.col(2));
    EXPECT_NEAR(r3.trace().real(), m - 3.0, 1e-12);

    // a non-unit vector is renormalized
    EXPECT_LT((deflate(CMat::Identity(m, m), CVec(5.0 * q.col(0))) - r1).norm(), 1e-14);
    EXPECT_THROW(deflate(CMat::Identity(m, m), CVec::Zero(m)), DomainError);
    EXPECT_THROW(deflate(CMat::Identity(m, m), CVec::Zero(m - 1)), DomainError);
}

TEST(Deflate, DeflatedObservationOrthogonalToFixedBeams) {
    // Gram-Schmidt deflation with non-orthogonal unit-modulus beams
    Rng rng(5);
    const int m = 9;
    CMat r = CMat::Identity(m, m);
    std::vector<CVec> fixed;
    for (int k = 0; k < 4; ++k) {
        const CVec s = unit_modulus(complex_noise(rng, m, 1.0));
        const CVec w = r * s;
        r = deflate(r, CVec(w / w.norm()));
        fixed.push_back(s);
        for (int trial = 0; trial < 10; ++trial) {
            const CVec ry = r * complex_noise(rng, m, 1.0);
            for (const auto& f : fixed) EXPECT_LT(std::abs(f.dot(ry)), 1e-9);
        }
    }
}

TEST(ConvergenceRatio, Examples) {
    EXPECT_EQ(convergence_ratio(3.0, 3.0), 0.0);
    EXPECT_EQ(convergence_ratio(2.0, 0.0), 1.0);
    EXPECT_EQ(convergence_ratio(2.0, 1.0), 0.5);
    EXPECT_TRUE(std::isnan(convergence_ratio(0.0, 1.0)));
    EXPECT_TRUE(std::isnan(convergence_ratio(-1.0, 1.0)));
}

TEST(TrainingConfig, Validation) {
    TrainingConfig t;
    EXPECT_NO_THROW(t.validate());
    t.rounds = 0;
    EXPECT_THROW(t.validate(), std::exception);
    t = TrainingConfig{};
    t.tolerance = 0.0;
    EXPECT_THROW(t.validate(), std::exception);
    t = TrainingConfig{};
    t.decay = 1.2;
    EXPECT_THROW(t.validate(), std::exception);
}

TEST(SingleBeam, NoiselessToyReachesOracle) {
    int pass = 0;
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const CMat h = los_like_toy(rng, 4, 4);
        PingPongSim sim(h, 0.0, 1.0, 1.0, seed);
        TrainingConfig tc;
        tc.rounds = 200;
        Rng lr(100 + seed);
        Learners l = toy_learners(4, 4, tc, lr);
        const auto r = run_single_beam(sim, tc, l);
        pass += std::abs(r.s.dot(h * r.p)) >= 0.85 * sigma_max(h);

        ASSERT_EQ(r.trace.records.size(), 201u);
        for (const auto& rec : r.trace.records) EXPECT_EQ(rec.beam_index, 1);
        EXPECT_TRUE(r.trace.switch_rounds.empty());
        EXPECT_EQ(sim.rounds(), 200);
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(std::abs(r.s(i)), 0.5, 1e-14);
            EXPECT_NEAR(std::abs(r.p(i)), 0.5, 1e-14);
        }
    }
    EXPECT_EQ(pass, 10);
}

TEST(SingleBeam, BestSoFarUtilityNonDecreasing) {
    Rng rng(40);
    const CMat h = los_like_toy(rng, 4, 4);
    PingPongSim sim(h, 0.0, 1.0, 1.0, 1);
    TrainingConfig tc;
    tc.rounds = 60;
    Rng lr(41);
    Learners l = toy_learners(4, 4, tc, lr);
    const auto r = run_single_beam(sim, tc, l);
    double best = 0.0;
    for (size_t i = 1; i < r.trace.records.size(); ++i) {
        const double u = r.trace.records[i].utility;
        EXPECT_GE(std::max(best, u), best);
        best = std::max(best, u);
    }
    EXPECT_GT(best, r.trace.records[1].utility);
}

TEST(MultiBeam, SingleStreamMatchesSingleBeam) {
    Rng rng(7);
    const CMat h = los_like_toy(rng, 4, 4);
    TrainingConfig tc;
    tc.rounds = 40;
    PingPongSim s1(h, 0.01, 1.0, 1.0, 3), s2(h, 0.01, 1.0, 1.0, 3);
    Rng a(8), b(8);
    Learners la = toy_learners(4, 4, tc, a), lb = toy_learners(4, 4, tc, b);
    const auto r1 = run_single_beam(s1, tc, la);
    const auto r2 = run_multi_beam(s2, 1, tc, lb);
    ASSERT_EQ(r1.trace.records.size(), r2.trace.records.size());
    for (size_t i = 0; i < r1.trace.records.size(); ++i) {
        EXPECT_EQ(r1.trace.records[i].loss_dl, r2.trace.records[i].loss_dl);
        EXPECT_EQ(r1.trace.records[i].utility, r2.trace.records[i].utility);
    }
    EXPECT_EQ(r1.s, r2.beams.s.col(0));
    EXPECT_EQ(r1.p, r2.beams.p.col(0));
}

TEST(MultiBeam, RankTwoFullyDigitalRecoversSubspaces) {
    for (int seed = 0; seed < 5; ++seed) {
        Rng rng(500 + seed);
        const int m = 5, n = 5;
        const CMat u = orthonormalize(random_cmat(rng, m, 2));
        const CMat v = orthonormalize(random_cmat(rng, n, 2));
        const CMat h = 3.0 * u.col(0) * v.col(0).adjoint() + 1.5 * u.col(1) * v.col(1).adjoint();
        PingPongSim sim(h, 0.0, 1.0, 1.0, seed);
        TrainingConfig tc;
        tc.fully_digital = true;
        tc.rounds = 400;
        tc.tolerance = 1e-5;
        Rng lr(600 + seed);
        Learners l = toy_learners(m, n, tc, lr);
        const auto r = run_multi_beam(sim, 2, tc, l);
        ASSERT_EQ(r.beams.trained, 2) << seed;
        ASSERT_EQ(r.trace.switch_rounds.size(), 1u);
        // principal angles via singular values of Q1^H Q2
        const CMat qs = orthonormalize(r.beams.s);
        const CMat qp = orthonormalize(r.beams.p);
        const RVec cs = Eigen::BDCSVD<CMat>(u.adjoint() * qs).singularValues();
        const RVec cp = Eigen::BDCSVD<CMat>(v.adjoint() * qp).singularValues();
        const double cos5 = std::cos(5.0 * kPi / 180.0);
        EXPECT_GE(cs.minCoeff(), cos5) << seed;
        EXPECT_GE(cp.minCoeff(), cos5) << seed;
        for (int k = 0; k < 2; ++k) EXPECT_NEAR(r.beams.s.col(k).norm(), 1.0, 1e-12);
    }
}

TEST(MultiBeam, TraceInvariantsAndBudget) {
    Rng rng(9);
    const CMat h = random_cmat(rng, 5, 5);
    PingPongSim sim(h, 1e-3, 1.0, 1.0, 4);
    TrainingConfig tc;
    tc.rounds = 150;
    tc.tolerance = 0.01;
    Rng lr(10);
    Learners l = toy_learners(5, 5, tc, lr);
    const auto r = run_multi_beam(sim, 3, tc, l);
    EXPECT_EQ(sim.rounds(), 150);
    ASSERT_EQ(r.trace.records.size(), 151u);
    for (size_t i = 1; i < r.trace.records.size(); ++i) {
        EXPECT_EQ(r.trace.records[i].t, r.trace.records[i - 1].t + 1);
        EXPECT_GE(r.trace.records[i].beam_index, r.trace.records[i - 1].beam_index);
    }
    EXPECT_EQ(r.beams.trained, static_cast<int>(r.trace.switch_rounds.size()) + 1);
    for (int k = 0; k < r.beams.trained; ++k)
        for (int i = 0; i < 5; ++i) EXPECT_NEAR(std::abs(r.beams.s(i, k)), 1.0 / std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(r.beams.lambda.squaredNorm(), 1.0, 1e-9);
    // learning rate decays once per switch
    EXPECT_NEAR(l.ue.learning_rate(),
                std::max(0.001, 0.005 * std::pow(0.99, r.trace.switch_rounds.size())), 1e-15);

    std::ostringstream os;
    write_trace_csv(os, r.trace, 7, true);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')),
              "trial,t,phase,beam_index,loss_dl,loss_ul,utility,epsilon,se_bits_per_hz");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 152);

    Rng lr2(1);
    Learners small = toy_learners(5, 5, tc, lr2);
    EXPECT_THROW(run_multi_beam(sim, 6, tc, small), DomainError);
}

TEST(DefaultSystem, SingleBeamNearOptimal) {
    SystemConfig cfg;
    MethodInputs in;
    in.system = cfg;
    int within = 0;
    const int trials = 10;
    for (int trial = 0; trial < trials; ++trial) {
        const std::uint64_t ts = trial_seed(2024, 0, trial);
        const ChannelMatrix ch = trial_channel(cfg, ts);
        const double opt = optimal_se(ch.h, 1, cfg.tx_power_bs, noise_power(cfg));
        const auto r = run_method("hybrid_stt", ch, in, method_seed(ts, "hybrid_stt"));
        within += r.se >= 0.9 * opt;
        EXPECT_EQ(r.pilot_rounds, 135);
    }
    EXPECT_GE(within, 8);
}

TEST(DefaultSystem, MultiBeamShortBudget) {
    // at T_a = 125 only the first two beams finish; thresholds pinned from measured runs
    SystemConfig cfg;
    cfg.n_streams = 4;
    MethodInputs in;
    in.system = cfg;
    for (int trial = 0; trial < 3; ++trial) {
        const std::uint64_t ts = trial_seed(7, 0, trial);
        const ChannelMatrix ch = trial_channel(cfg, ts);
        const double opt = optimal_se(ch.h, 4, cfg.tx_power_bs, noise_power(cfg));
        const auto r = run_method("hybrid_stt", ch, in, method_seed(ts, "hybrid_stt"));
        EXPECT_GE(r.se, 0.5 * opt);
        EXPECT_GE(r.trace.switch_rounds.size(), 1u);
        const CMat g = r.s.adjoint() * r.s;
        for (int i = 0; i < g.rows(); ++i)
            for (int j = 0; j < g.cols(); ++j)
                if (i != j) EXPECT_LE(std::abs(g(i, j)), 0.15);
    }
}
