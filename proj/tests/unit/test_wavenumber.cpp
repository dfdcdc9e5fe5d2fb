// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "stt/metrics.hpp"
#include "stt/wavenumber.hpp"
#include "test_support.hpp"

using namespace stt;

namespace {

struct DefaultSystem {
    SystemConfig cfg;
    UlaGeometry bs = bs_array(cfg);
    UlaGeometry ue = ue_array(cfg);
    Wtm wu = build_wtm(ue, cfg.wavelength());
    Wtm wb = build_wtm(bs, cfg.wavelength());
};

const DefaultSystem& default_system() {
    static const DefaultSystem t;
    return t;
}

}  // namespace

TEST(WavenumberGrid, Examples) {
    const double lam = 0.01;
    auto g = wavenumber_grid(lam / 2, lam);
    ASSERT_EQ(g.size(), 1);
    EXPECT_EQ(g.indices[0], 0);
    g = wavenumber_grid(2 * lam, lam);
    EXPECT_EQ(g.indices, (std::vector<int>{-2, -1, 0, 1, 2}));
    const auto& t = default_system();
    EXPECT_EQ(t.wb.grid.size(), 255);
    EXPECT_EQ(t.wb.grid.first(), -127);
    EXPECT_EQ(t.wb.grid.last(), 127);
    EXPECT_THROW(wavenumber_grid(0.0, lam), DomainError);
}

TEST(WavenumberGrid, ContiguousSymmetric) {
    for (double r : {0.3, 1.7, 5.0, 12.49}) {
        const auto g = wavenumber_grid(r, 1.0);
        EXPECT_EQ(g.first(), -g.last());
        for (int i = 1; i < g.size(); ++i) EXPECT_EQ(g.indices[i], g.indices[i - 1] + 1);
        EXPECT_LE(g.last(), r);
        EXPECT_GT(g.last() + 1, r);
    }
}

TEST(BuildWtm, ZeroColumnAndUnitNorms) {
    const auto& t = default_system();
    const CVec c0 = t.wb.matrix.col(t.wb.grid.position(0));
    EXPECT_NEAR((c0.array() - cplx(1.0 / std::sqrt(255.0), 0.0)).abs().maxCoeff(), 0.0, 1e-15);
    for (int c = 0; c < t.wb.cols(); ++c) EXPECT_NEAR(t.wb.matrix.col(c).norm(), 1.0, 1e-12);
}

TEST(BuildWtm, RejectsApertureMismatch) {
    const auto g = build_ula(5, 0.5, Vec3::Zero(), Vec3::UnitX());
    EXPECT_THROW(build_wtm(g, wavenumber_grid(3.0, 1.0)), DomainError);
}

// The lambda/2 grid endpoints +-(N-1)/2 alias to the same column; all other
// pairs are Dirichlet-kernel leakage of exactly 1/N.
TEST(BuildWtm, GramStructureForHalfWavelengthArrays) {
    for (int n : {15, 31, 63, 127, 255}) {
        const double lam = 0.01;
        const auto g = build_ula(n, lam / 2, Vec3::Zero(), Vec3::UnitX());
        const Wtm w = build_wtm(g, lam);
        ASSERT_EQ(w.cols(), n);
        const CMat gram = w.matrix.adjoint() * w.matrix;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double v = std::abs(gram(i, j));
                const bool aliased = (i == 0 && j == n - 1) || (i == n - 1 && j == 0);
                if (i == j || aliased) {
                    EXPECT_NEAR(v, 1.0, 1e-10);
                } else {
                    EXPECT_LE(v, 1.0 / n + 1e-10);
                }
            }
    }
}

TEST(ToWavenumber, ZeroAndDimensions) {
    const auto& t = default_system();
    const CMat z = CMat::Zero(255, 255);
    EXPECT_EQ(to_wavenumber(z, t.wu, t.wb).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(from_wavenumber(z, t.wu, t.wb).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_THROW(to_wavenumber(CMat::Zero(3, 255), t.wu, t.wb), DomainError);
    EXPECT_THROW(from_wavenumber(CMat::Zero(3, 255), t.wu, t.wb), DomainError);
}

TEST(ToWavenumber, LosMapIsBandedAndSparse) {
    const auto& t = default_system();
    const CMat h = los_channel(t.cfg, t.bs, t.ue);
    const CMat ha = to_wavenumber(h, t.wu, t.wb);
    // broadside LoS energy sits where the UE and BS wavenumbers match, i.e. near i = -j
    // (the UE grid sees the same plane waves with the receive sign convention)
    double band = 0.0;
    for (int r = 0; r < ha.rows(); ++r)
        for (int c = 0; c < ha.cols(); ++c) {
            const int i = t.wu.grid.indices[r];
            const int j = t.wb.grid.indices[c];
            if (std::abs(i + j) <= 3 || std::abs(i - j) <= 3) band += std::norm(ha(r, c));
        }
    EXPECT_GT(band / ha.squaredNorm(), 0.9);
    RVec mags(ha.size());
    for (int k = 0; k < ha.size(); ++k) mags(k) = std::abs(ha.data()[k]);
    std::sort(mags.data(), mags.data() + mags.size(), std::greater<double>());
    double top = 0.0;
    const int keep = ha.size() / 20;
    for (int k = 0; k < keep; ++k) top += mags(k) * mags(k);
    EXPECT_GT(top / ha.squaredNorm(), 0.9);
}

TEST(ToWavenumber, SingularSpectrumPreserved) {
    const auto& t = default_system();
    const CMat h = los_channel(t.cfg, t.bs, t.ue);
    const RVec a = Eigen::BDCSVD<CMat>(h).singularValues();
    const RVec b = Eigen::BDCSVD<CMat>(to_wavenumber(h, t.wu, t.wb)).singularValues();
    for (int i = 0; i < 5; ++i) EXPECT_NEAR((b(i) / b(0)) / (a(i) / a(0)), 1.0, 0.05) << i;
}

TEST(ToWavenumber, SingularSpectrumOverRandomChannels) {
    const auto& t = default_system();
    for (int s = 0; s < 10; ++s) {
        Rng rng(1000 + s);
        const CMat h = random_channel(t.cfg, rng).h;
        const RVec a = Eigen::BDCSVD<CMat>(h).singularValues();
        const RVec b = Eigen::BDCSVD<CMat>(to_wavenumber(h, t.wu, t.wb)).singularValues();
        for (int i = 0; i < 6; ++i) EXPECT_NEAR((b(i) / b(0)) / (a(i) / a(0)), 1.0, 0.05) << s << ' ' << i;
    }
}

TEST(FromWavenumber, RoundTripEnergy) {
    const auto& t = default_system();
    const CMat h = los_channel(t.cfg, t.bs, t.ue);
    const CMat ha = to_wavenumber(h, t.wu, t.wb);
    const CMat back = from_wavenumber(ha, t.wu, t.wb);
    const double e = h.squaredNorm();
    // projection onto the WTM column spaces: captured energy is Re<back, h>
    EXPECT_GE(std::real((back.adjoint() * h).trace()) / e, 0.95);

    const double thr = 0.1 * ha.cwiseAbs().maxCoeff();
    int rmin = ha.rows(), rmax = -1, cmin = ha.cols(), cmax = -1;
    for (int r = 0; r < ha.rows(); ++r)
        for (int c = 0; c < ha.cols(); ++c)
            if (std::abs(ha(r, c)) > thr) {
                rmin = std::min(rmin, r);
                rmax = std::max(rmax, r);
                cmin = std::min(cmin, c);
                cmax = std::max(cmax, c);
            }
    const Wtm tu = truncate(t.wu, t.wu.grid.indices[rmin], t.wu.grid.indices[rmax]);
    const Wtm tb = truncate(t.wb, t.wb.grid.indices[cmin], t.wb.grid.indices[cmax]);
    const CMat back_e = from_wavenumber(to_wavenumber(h, tu, tb), tu, tb);
    EXPECT_GE(std::real((back_e.adjoint() * h).trace()) / e, 0.90);
}

TEST(FromWavenumber, AdjointIdentity) {
    Rng rng(4);
    const SystemConfig c = stt::testing::toy_config(9, 7, 1.0);
    const Wtm wu = build_wtm(ue_array(c), c.wavelength());
    const Wtm wb = build_wtm(bs_array(c), c.wavelength());
    const CMat x = stt::testing::random_cmat(rng, wu.cols(), wb.cols());
    const CMat y = stt::testing::random_cmat(rng, 7, 9);
    const cplx lhs = (from_wavenumber(x, wu, wb).adjoint() * y).trace();
    const cplx rhs = (x.adjoint() * to_wavenumber(y, wu, wb)).trace() * 63.0;
    EXPECT_NEAR(std::abs(lhs - rhs) / std::abs(rhs), 0.0, 1e-12);
}

TEST(Truncate, Examples) {
    const auto& t = default_system();
    const Wtm full = truncate(t.wb, -127, 127);
    EXPECT_TRUE((full.matrix.array() == t.wb.matrix.array()).all());
    const Wtm one = truncate(t.wb, 0, 0);
    EXPECT_EQ(one.cols(), 1);
    EXPECT_TRUE(one.matrix.col(0).isApprox(t.wb.matrix.col(127)));
    const Wtm mid = truncate(t.wb, -32, 32);
    EXPECT_EQ(mid.cols(), 65);
    ASSERT_TRUE(mid.truncated_range.has_value());
    EXPECT_EQ(mid.truncated_range->first, -32);
    EXPECT_EQ(mid.grid.first(), -32);
    EXPECT_THROW(truncate(t.wb, 5, 4), DomainError);
    EXPECT_THROW(truncate(t.wb, -200, 0), DomainError);
}

TEST(Truncate, CapturedEnergyMonotone) {
    const auto& t = default_system();
    Rng rng(8);
    const CMat h = random_channel(t.cfg, rng).h;
    double prev = -1.0;
    for (int w = 0; w <= 127; w += 9) {
        const Wtm tu = truncate(t.wu, -w, w);
        const Wtm tb = truncate(t.wb, -w, w);
        const double e = to_wavenumber(h, tu, tb).squaredNorm();
        EXPECT_GE(e, prev - 1e-24);
        prev = e;
    }
}
