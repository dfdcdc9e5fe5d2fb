// SPDX-License-Identifier: Apache-2.0
#include "stt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "stt/linalg.hpp"

namespace stt {

double spectral_efficiency(const CMat& h, const CMat& s, const CMat& p, const CMat& lambda,
                           double sigma2) {
    if (s.rows() != h.rows() || p.rows() != h.cols() || s.cols() != p.cols() ||
        lambda.rows() != p.cols() || lambda.cols() != p.cols())
        throw DomainError("spectral_efficiency dimension mismatch");
    if (!(sigma2 > 0)) throw DomainError("spectral_efficiency needs positive noise power");
    const CMat c = sigma2 * (s.adjoint() * s);
    const RVec ev = Eigen::SelfAdjointEigenSolver<CMat>(c, Eigen::EigenvaluesOnly).eigenvalues();
    if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff())) throw NumericError("ill-conditioned combiner: S^H S is singular");
    // det(I + C^{-1} G G^H) = det(I + C^{-1/2} G G^H C^{-1/2}), the latter Hermitian
    const CMat g = s.adjoint() * h * p * lambda;
    const CMat ci = hermitian_inv_sqrt(c);
    const CMat herm = CMat::Identity(s.cols(), s.cols()) + ci * g * g.adjoint() * ci;
    Eigen::SelfAdjointEigenSolver<CMat> es(herm, Eigen::EigenvaluesOnly);
    double r = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) r += std::log2(std::max(es.eigenvalues()(i), 1e-300));
    return r;
}

WaterFilling water_filling(const RVec& gains, double total_power, double sigma2) {
    if (gains.size() == 0 || !(gains.maxCoeff() > 0)) throw DomainError("water_filling needs a positive gain");
    if (!(total_power >= 0)) throw DomainError("water_filling needs nonnegative power");
    if ((gains.array() < 0).any()) throw DomainError("water_filling gains must be nonnegative");
    auto fill = [&](double mu) {
        double sum = 0.0;
        for (int i = 0; i < gains.size(); ++i)
            if (gains(i) > 0) sum += std::max(0.0, mu - sigma2 / gains(i));
        return sum;
    };
    double lo = 0.0;
    double hi = total_power;
    for (int i = 0; i < gains.size(); ++i)
        if (gains(i) > 0) hi = std::max(hi, total_power + sigma2 / gains(i));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (fill(mid) > total_power ? hi : lo) = mid;
    }
    WaterFilling w;
    w.mu = 0.5 * (lo + hi);
    w.powers = RVec::Zero(gains.size());
    for (int i = 0; i < gains.size(); ++i)
        if (gains(i) > 0) w.powers(i) = std::max(0.0, w.mu - sigma2 / gains(i));
    // refine mu in closed form on the active set found by bisection
    double inv_sum = 0.0;
    int active = 0;
    for (int i = 0; i < gains.size(); ++i)
        if (w.powers(i) > 0) {
            inv_sum += sigma2 / gains(i);
            ++active;
        }
    if (active > 0) {
        w.mu = (total_power + inv_sum) / active;
        for (int i = 0; i < gains.size(); ++i)
            if (w.powers(i) > 0) w.powers(i) = w.mu - sigma2 / gains(i);
    }
    return w;
}

double evaluate_se(const CMat& h, const CMat& s, const CMat& p, double total_power,
                   double sigma2) {
    if (s.cols() != p.cols()) throw DomainError("evaluate_se beam count mismatch");
    std::vector<int> keep;
    for (int k = 0; k < s.cols(); ++k)
        if (s.col(k).norm() > 1e-12 && p.col(k).norm() > 1e-12) keep.push_back(k);
    if (keep.empty()) return 0.0;
    const int n = static_cast<int>(keep.size());
    CMat sk(s.rows(), n);
    CMat pk(p.rows(), n);
    for (int i = 0; i < n; ++i) {
        sk.col(i) = s.col(keep[i]);
        pk.col(i) = p.col(keep[i]);
    }
    const CMat w = hermitian_inv_sqrt(sk.adjoint() * sk);
    const CMat g = w * sk.adjoint() * h * pk;
    const RVec gains = g.diagonal().cwiseAbs2();
    if (!(gains.maxCoeff() > 0)) return 0.0;
    const WaterFilling wf = water_filling(gains, total_power, sigma2);
    const CMat lambda = wf.powers.cwiseSqrt().cast<cplx>().asDiagonal();
    return spectral_efficiency(h, sk, pk, lambda, sigma2);
}

double optimal_se(const CMat& h, int n_streams, double total_power, double sigma2) {
    Eigen::BDCSVD<CMat> svd(h);
    const RVec sv = svd.singularValues().head(std::min<int>(n_streams, svd.singularValues().size()));
    const RVec gains = sv.cwiseAbs2();
    if (!(gains.maxCoeff() > 0)) return 0.0;
    const WaterFilling wf = water_filling(gains, total_power, sigma2);
    double r = 0.0;
    for (int i = 0; i < gains.size(); ++i) r += std::log2(1.0 + wf.powers(i) * gains(i) / sigma2);
    return r;
}

double edof(const CMat& h) {
    const CMat c = h.adjoint() * h;
    const double tr = c.trace().real();
    if (!(tr > 0)) throw DomainError("edof of a zero matrix");
    const double tr2 = c.cwiseAbs2().sum();  // tr(C^2) for Hermitian C
    return tr * tr / tr2;
}

PowerModel PowerModel::hybrid(int n_bs, int n_ue, int n_streams) {
    PowerModel pm;
    pm.n_rf_bs = n_streams;
    pm.n_rf_ue = n_streams;
    pm.n_ps_bs = n_bs * n_streams;
    pm.n_ps_ue = n_ue * n_streams;
    return pm;
}

PowerModel PowerModel::fully_digital(int n_bs, int n_ue) {
    PowerModel pm;
    pm.n_rf_bs = n_bs;
    pm.n_rf_ue = n_ue;
    return pm;
}

double PowerModel::total(double power_bs, double power_ue) const {
    return power_bs + power_ue + p_rf * (n_rf_bs + n_rf_ue) + 2.0 * p_bb + p_ps * (n_ps_bs + n_ps_ue);
}

double energy_efficiency(double se, const PowerModel& pm, double power_bs, double power_ue) {
    const double total = pm.total(power_bs, power_ue);
    if (!(total > 0)) throw DomainError("total power consumption must be positive");
    return se / total;
}

RMat beam_gain_map(const CVec& beam, const UlaGeometry& geom, const std::vector<double>& xs,
                   const std::vector<double>& zs, double k0) {
    if (xs.empty() || zs.empty()) throw DomainError("beam_gain_map grid is empty");
    if (beam.size() != geom.count()) throw DomainError("beam_gain_map beam length mismatch");
    RMat m(zs.size(), xs.size());
    for (size_t iz = 0; iz < zs.size(); ++iz)
        for (size_t ix = 0; ix < xs.size(); ++ix) {
            const CVec a = array_response(geom, Vec3(xs[ix], 0.0, zs[iz]), k0);
            m(iz, ix) = std::norm(beam.dot(a));
        }
    const double mx = m.maxCoeff();
    if (mx > 0) m /= mx;
    return m;
}

Eigen::Vector2d top_quantile_centroid(const RMat& map, const std::vector<double>& xs,
                                      const std::vector<double>& zs, double quantile) {
    std::vector<double> v(map.data(), map.data() + map.size());
    const size_t k = std::min(v.size() - 1, static_cast<size_t>(quantile * v.size()));
    std::nth_element(v.begin(), v.begin() + k, v.end());
    const double thr = v[k];
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    double w = 0.0;
    for (int iz = 0; iz < map.rows(); ++iz)
        for (int ix = 0; ix < map.cols(); ++ix)
            if (map(iz, ix) >= thr) {
                c += map(iz, ix) * Eigen::Vector2d(xs[ix], zs[iz]);
                w += map(iz, ix);
            }
    return w > 0 ? Eigen::Vector2d(c / w) : c;
}

}  // namespace stt
