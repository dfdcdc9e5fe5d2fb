// SPDX-License-Identifier: Apache-2.0
#include "stt/linalg.hpp"

#include <cmath>
#include <vector>

namespace stt {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 over a mixed key
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

cplx complex_normal(Rng& rng, double variance) {
    if (variance <= 0.0) return {0.0, 0.0};
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

CVec complex_noise(Rng& rng, int n, double variance) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = complex_normal(rng, variance);
    return v;
}

CMat orthonormalize(const CMat& a) {
    CMat q = a;
    for (int k = 0; k < q.cols(); ++k) {
        const double before = q.col(k).norm();
        for (int j = 0; j < k; ++j) {
            if (q.col(j).squaredNorm() == 0.0) continue;
            const cplx c = q.col(j).dot(q.col(k));
            q.col(k) -= c * q.col(j);
        }
        const double nrm = q.col(k).norm();
        if (nrm > 1e-12 * before && nrm > 1e-300) {
            q.col(k) /= nrm;
        } else {
            q.col(k).setZero();
        }
    }
    return q;
}

CVec unit_modulus(const CVec& v) {
    const double s = 1.0 / std::sqrt(static_cast<double>(v.size()));
    CVec out(v.size());
    for (int i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a == 0.0) throw NumericError("unit_modulus: zero entry");
        out(i) = v(i) * (s / a);
    }
    return out;
}

CVec unit_norm(const CVec& v) {
    const double n = v.norm();
    if (n == 0.0) throw NumericError("unit_norm: zero vector");
    return v / n;
}

CMat hermitian_inv_sqrt(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
    const RVec& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0) throw NumericError("matrix is not positive definite");
    const RVec d = ev.array().rsqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

CMat nonzero_columns(const CMat& a, double tol) {
    std::vector<int> keep;
    for (int k = 0; k < a.cols(); ++k)
        if (a.col(k).norm() > tol) keep.push_back(k);
    CMat out(a.rows(), static_cast<int>(keep.size()));
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) out.col(i) = a.col(keep[i]);
    return out;
}

}  // namespace stt
