// SPDX-License-Identifier: Apache-2.0
#include "stt/baselines.hpp"

#include <cmath>

#include "stt/linalg.hpp"
#include "stt/metrics.hpp"

namespace stt {

BeamformerSet svd_oracle(const CMat& h, int n_streams, double total_power, double sigma2) {
    const int k = static_cast<int>(std::min(h.rows(), h.cols()));
    if (n_streams < 1 || n_streams > k) throw DomainError("svd_oracle n_streams out of range");
    Eigen::BDCSVD<CMat> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    BeamformerSet b;
    b.hybrid = false;
    b.trained = n_streams;
    b.s = svd.matrixU().leftCols(n_streams);
    b.p = svd.matrixV().leftCols(n_streams);
    const RVec gains = svd.singularValues().head(n_streams).cwiseAbs2();
    if (sigma2 > 0 && gains.maxCoeff() > 0) {
        b.lambda = water_filling(gains, total_power, sigma2).powers.cwiseSqrt();
    } else {
        b.lambda = RVec::Constant(n_streams, std::sqrt(total_power / n_streams));
    }
    return b;
}

BeamformerSet power_method(PingPongSim& sim, int n_streams, int rounds, Rng& rng,
                           const std::optional<CMat>& initial_p, const RoundCallback& on_round) {
    if (rounds < 1) throw DomainError("power_method needs at least one round");
    if (n_streams < 1 || n_streams > std::min(sim.n_bs(), sim.n_ue()))
        throw DomainError("power_method n_streams out of range");
    CMat p;
    if (initial_p) {
        if (initial_p->rows() != sim.n_bs() || initial_p->cols() != n_streams)
            throw DomainError("power_method initial beams have the wrong shape");
        p = orthonormalize(*initial_p);
    } else {
        p.resize(sim.n_bs(), n_streams);
        for (int c = 0; c < n_streams; ++c) p.col(c) = complex_noise(rng, sim.n_bs(), 1.0);
        p = orthonormalize(p);
    }
    CMat s;
    for (int r = 0; r < rounds; ++r) {
        s = orthonormalize(sim.dl_block(p));
        p = orthonormalize(sim.ul_block(s).conjugate());
        if (on_round) on_round(r + 1, s, p);
    }
    BeamformerSet b;
    b.hybrid = false;
    b.s = s;
    b.p = p;
    b.trained = n_streams;
    b.lambda = RVec::Constant(n_streams, std::sqrt(sim.power_bs() / n_streams));
    return b;
}

CVec steering_vector(int count, double u) {
    const int half = (count - 1) / 2;
    const double scale = 1.0 / std::sqrt(static_cast<double>(count));
    CVec a(count);
    for (int i = 0; i < count; ++i) a(i) = std::polar(scale, kPi * (i - half) * u);
    return a;
}

int default_codebook_depth(int count) {
    int d = 0;
    while ((1 << d) < count) ++d;
    return std::max(d, 1);
}

namespace {

CVec zadoff_chu(int count) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(count));
    CVec z(count);
    const double parity = count % 2 == 1 ? 1.0 : 0.0;
    for (int n = 0; n < count; ++n)
        z(n) = std::polar(scale, -kPi * n * (n + parity) / count);
    return z;
}

// Magnitude least-squares fit of |w^H a(u)| to a sector indicator, unit-modulus projected.
CMat fit_sector_beams(const CMat& a, const RVec& u, const std::vector<std::pair<double, double>>& sectors,
                      int count) {
    const int k = static_cast<int>(u.size());
    const int ns = static_cast<int>(sectors.size());
    RMat g = RMat::Zero(k, ns);
    for (int c = 0; c < ns; ++c)
        for (int i = 0; i < k; ++i) g(i, c) = (u(i) >= sectors[c].first && u(i) < sectors[c].second) ? 1.0 : 0.0;
    // chirp perturbation keeps the first projection away from exact zeros
    const CVec chirp = zadoff_chu(count) * 1e-3;
    CMat w = (a * g.cast<cplx>()) / static_cast<double>(k);
    for (int c = 0; c < ns; ++c) w.col(c) = unit_modulus(w.col(c) + chirp);
    for (int it = 0; it < 8; ++it) {
        const CMat r = a.adjoint() * w;  // r(u) = a(u)^H w = conj(w^H a(u))
        CMat t(k, ns);
        for (int c = 0; c < ns; ++c)
            for (int i = 0; i < k; ++i)
                t(i, c) = g(i, c) * (std::abs(r(i, c)) > 0 ? r(i, c) / std::abs(r(i, c)) : cplx(1.0, 0.0));
        w = a * t / static_cast<double>(k);
        for (int c = 0; c < ns; ++c) w.col(c) = unit_modulus(w.col(c) + chirp);
    }
    return w;
}

}  // namespace

HierarchicalCodebook build_hierarchical_codebook(int count, int depth) {
    if (depth < 1) throw DomainError("codebook depth must be >= 1");
    if (count < 1 || count % 2 == 0) throw DomainError("codebook array count must be odd");
    HierarchicalCodebook cb;
    cb.count = count;
    cb.depth = depth;
    cb.levels.resize(depth + 1);
    cb.levels[0].push_back(CodebookNode{0, -1.0, 1.0, zadoff_chu(count)});

    const int k = 2 * std::max(count, 1 << depth);
    RVec u(k);
    CMat a(count, k);
    for (int i = 0; i < k; ++i) {
        u(i) = -1.0 + (i + 0.5) * 2.0 / k;
        a.col(i) = steering_vector(count, u(i)) * std::sqrt(static_cast<double>(count));
    }
    for (int l = 1; l <= depth; ++l) {
        const int nodes = 1 << l;
        const double width = 2.0 / nodes;
        std::vector<std::pair<double, double>> sectors;
        for (int c = 0; c < nodes; ++c) sectors.emplace_back(-1.0 + c * width, -1.0 + (c + 1) * width);
        CMat beams;
        if (l == depth) {
            beams.resize(count, nodes);
            for (int c = 0; c < nodes; ++c)
                beams.col(c) = steering_vector(count, 0.5 * (sectors[c].first + sectors[c].second));
        } else {
            beams = fit_sector_beams(a, u, sectors, count);
        }
        cb.levels[l].reserve(nodes);
        for (int c = 0; c < nodes; ++c)
            cb.levels[l].push_back(CodebookNode{l, sectors[c].first, sectors[c].second, beams.col(c)});
    }
    return cb;
}

SearchResult hierarchical_search(PingPongSim& sim, const HierarchicalCodebook& bs_tree,
                                 const HierarchicalCodebook& ue_tree) {
    if (bs_tree.count != sim.n_bs() || ue_tree.count != sim.n_ue())
        throw DomainError("codebook sizes do not match the channel");
    if (bs_tree.depth != ue_tree.depth) throw DomainError("codebook depths differ");
    const long start = sim.dl_count() + sim.ul_count();
    int bi = 0;
    int ui = 0;
    CVec s = ue_tree.node(0, 0).beam;
    CVec p = bs_tree.node(0, 0).beam.conjugate();
    for (int l = 1; l <= bs_tree.depth; ++l) {
        double best = -1.0;
        int pick = 0;
        for (int c = 0; c < 2; ++c) {
            const CVec cand = bs_tree.node(l, 2 * bi + c).beam.conjugate();
            const double pw = std::norm(s.dot(sim.dl_pilot(cand)));
            if (pw > best) {
                best = pw;
                pick = c;
            }
        }
        bi = 2 * bi + pick;
        p = bs_tree.node(l, bi).beam.conjugate();

        best = -1.0;
        pick = 0;
        for (int c = 0; c < 2; ++c) {
            const CVec cand = ue_tree.node(l, 2 * ui + c).beam;
            const double pw = std::norm((p.transpose() * sim.ul_pilot(cand)).value());
            if (pw > best) {
                best = pw;
                pick = c;
            }
        }
        ui = 2 * ui + pick;
        s = ue_tree.node(l, ui).beam;
    }
    SearchResult r;
    r.s = s;
    r.p = p;
    r.bs_leaf = bi;
    r.ue_leaf = ui;
    r.pilots_used = static_cast<int>(sim.dl_count() + sim.ul_count() - start);
    return r;
}

}  // namespace stt
