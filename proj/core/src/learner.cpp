// SPDX-License-Identifier: Apache-2.0
#include "stt/learner.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace stt {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr int kSnapshotVersion = 1;
constexpr double kZeroEntry = 1e-12;

}  // namespace

CVec normalize_beam(const CVec& raw, BeamConstraint c) {
    CVec r = raw;
    for (int i = 0; i < r.size(); ++i)
        if (r(i) == cplx(0.0, 0.0)) r(i) = cplx(kZeroEntry, 0.0);
    if (c == BeamConstraint::UnitNorm) return r / r.norm();
    const double s = 1.0 / std::sqrt(static_cast<double>(r.size()));
    for (int i = 0; i < r.size(); ++i) r(i) *= s / std::abs(r(i));
    return r;
}

double beam_loss(const CVec& beam_raw, const CVec& y, Side side, BeamConstraint c) {
    if (beam_raw.size() != y.size()) throw DomainError("beam_loss length mismatch");
    const CVec b = normalize_beam(beam_raw, c);
    return side == Side::DL ? std::abs(b.dot(y)) : std::abs((b.transpose() * y).value());
}

MlpLearner::MlpLearner(Wtm wtm, std::vector<int> hidden, double learning_rate,
                       BeamConstraint constraint, Rng& rng, AdamParams adam)
    : wtm_(std::move(wtm)), lr_(learning_rate), constraint_(constraint), adam_(adam) {
    if (!(learning_rate > 0)) throw DomainError("learning rate must be positive");
    if (wtm_.rows() < 1 || wtm_.cols() < 1) throw DomainError("learner WTM is empty");
    dims_.push_back(2 * wtm_.rows());
    for (int h : hidden) {
        if (h < 1) throw DomainError("hidden layer widths must be positive");
        dims_.push_back(h);
    }
    dims_.push_back(2 * wtm_.cols());
    layout();
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        const int fan_in = dims_[l];
        const int fan_out = dims_[l + 1];
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        std::uniform_real_distribution<double> u(-a, a);
        for (int k = 0; k < fan_in * fan_out; ++k) params_(w_offset(l) + k) = u(rng);
    }
}

void MlpLearner::layout() {
    offsets_.clear();
    int off = 0;
    for (int l = 0; l + 1 < static_cast<int>(dims_.size()); ++l) {
        offsets_.push_back(off);
        off += dims_[l] * dims_[l + 1];
        offsets_.push_back(off);
        off += dims_[l + 1];
    }
    params_ = RVec::Zero(off);
    m_ = RVec::Zero(off);
    v_ = RVec::Zero(off);
    steps_ = 0;
}

RVec MlpLearner::mlp(const RVec& x, Cache* cache) const {
    const int layers = static_cast<int>(dims_.size()) - 1;
    RVec a = x;
    if (cache) {
        cache->pre.clear();
        cache->act.clear();
        cache->act.push_back(a);
    }
    for (int l = 0; l < layers; ++l) {
        Eigen::Map<const RowMat> w(params_.data() + w_offset(l), dims_[l + 1], dims_[l]);
        Eigen::Map<const RVec> b(params_.data() + b_offset(l), dims_[l + 1]);
        RVec z = w * a + b;
        if (cache) cache->pre.push_back(z);
        a = (l + 1 < layers) ? RVec(z.cwiseMax(0.0)) : z;
        if (cache) cache->act.push_back(a);
    }
    return a;
}

namespace {

RVec stack(const CVec& y) {
    RVec x(2 * y.size());
    x.head(y.size()) = y.real();
    x.tail(y.size()) = y.imag();
    return x;
}

CVec unstack(const RVec& o) {
    const int g = static_cast<int>(o.size() / 2);
    CVec s(g);
    for (int i = 0; i < g; ++i) s(i) = cplx(o(i), o(g + i));
    return s;
}

}  // namespace

ForwardResult MlpLearner::forward(const CVec& y) const {
    if (y.size() != wtm_.rows()) throw DomainError("learner input length mismatch");
    ForwardResult f;
    f.beam_raw = wtm_.matrix * unstack(mlp(stack(y), nullptr));
    f.beam = normalize_beam(f.beam_raw, constraint_);
    return f;
}

double MlpLearner::loss(const CVec& y, Side side) const {
    return beam_loss(forward(y).beam_raw, y, side, constraint_);
}

RVec MlpLearner::gradient(const CVec& y, Side side, double* loss_out) const {
    if (y.size() != wtm_.rows()) throw DomainError("learner input length mismatch");
    Cache cache;
    const RVec out = mlp(stack(y), &cache);
    CVec r = wtm_.matrix * unstack(out);
    for (int i = 0; i < r.size(); ++i)
        if (r(i) == cplx(0.0, 0.0)) r(i) = cplx(kZeroEntry, 0.0);
    const CVec b = normalize_beam(r, constraint_);
    const CVec target = side == Side::DL ? y : CVec(y.conjugate());
    const cplx z = b.dot(target);
    const double l = std::abs(z);
    if (loss_out) *loss_out = l;

    RVec grad = RVec::Zero(params_.size());
    if (l == 0.0) return grad;

    // dL = Re(g^H d.) convention throughout
    const CVec g_b = target * (std::conj(z) / l);
    CVec g_r(r.size());
    if (constraint_ == BeamConstraint::UnitModulus) {
        const cplx j(0.0, 1.0);
        for (int i = 0; i < r.size(); ++i) {
            const double t = std::real(std::conj(g_b(i)) * j * b(i));
            g_r(i) = t * j * r(i) / std::norm(r(i));
        }
    } else {
        const cplx proj = b.dot(g_b);
        g_r = (g_b - b * std::real(proj)) / r.norm();
    }
    const CVec g_s = wtm_.matrix.adjoint() * g_r;
    RVec delta = stack(g_s);

    const int layers = static_cast<int>(dims_.size()) - 1;
    for (int l2 = layers - 1; l2 >= 0; --l2) {
        if (l2 + 1 < layers) {
            for (int k = 0; k < delta.size(); ++k)
                if (cache.pre[l2](k) <= 0.0) delta(k) = 0.0;
        }
        Eigen::Map<RowMat> gw(grad.data() + w_offset(l2), dims_[l2 + 1], dims_[l2]);
        gw.noalias() = delta * cache.act[l2].transpose();
        grad.segment(b_offset(l2), dims_[l2 + 1]) = delta;
        if (l2 > 0) {
            Eigen::Map<const RowMat> w(params_.data() + w_offset(l2), dims_[l2 + 1], dims_[l2]);
            delta = w.transpose() * delta;
        }
    }
    return grad;
}

StepResult MlpLearner::grad_step(const CVec& y, Side side) {
    StepResult res;
    res.beam = forward(y).beam;
    const RVec g = gradient(y, side, &res.loss);
    if (!g.allFinite()) throw NumericError("non-finite gradient");
    ++steps_;
    m_ = adam_.beta1 * m_ + (1.0 - adam_.beta1) * g;
    v_ = adam_.beta2 * v_ + (1.0 - adam_.beta2) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(steps_));
    params_.array() += lr_ * (m_.array() / c1) / ((v_.array() / c2).sqrt() + adam_.eps);
    return res;
}

void MlpLearner::decay_learning_rate(double alpha, double floor) {
    if (!(alpha > 0 && alpha <= 1)) throw DomainError("decay factor must lie in (0, 1]");
    if (alpha < 1.0) lr_ = std::max(floor, alpha * lr_);
}

void MlpLearner::set_learning_rate(double lr) {
    if (!(lr > 0)) throw DomainError("learning rate must be positive");
    lr_ = lr;
}

void MlpLearner::set_parameters(const RVec& p) {
    if (p.size() != params_.size()) throw DomainError("parameter vector length mismatch");
    params_ = p;
}

double MlpLearner::min_abs_preactivation(const CVec& y) const {
    Cache cache;
    mlp(stack(y), &cache);
    double m = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l + 1 < cache.pre.size(); ++l) m = std::min(m, cache.pre[l].cwiseAbs().minCoeff());
    return m;
}

std::string MlpLearner::to_json() const {
    nlohmann::json j;
    j["version"] = kSnapshotVersion;
    j["layer_dims"] = dims_;
    j["learning_rate"] = lr_;
    j["constraint"] = constraint_ == BeamConstraint::UnitModulus ? "unit_modulus" : "unit_norm";
    j["steps"] = steps_;
    j["adam"] = {{"beta1", adam_.beta1}, {"beta2", adam_.beta2}, {"eps", adam_.eps}};
    j["params"] = std::vector<double>(params_.data(), params_.data() + params_.size());
    j["adam_m"] = std::vector<double>(m_.data(), m_.data() + m_.size());
    j["adam_v"] = std::vector<double>(v_.data(), v_.data() + v_.size());
    std::vector<double> re(wtm_.matrix.size());
    std::vector<double> im(wtm_.matrix.size());
    for (int c = 0; c < wtm_.cols(); ++c)
        for (int r = 0; r < wtm_.rows(); ++r) {
            re[r * wtm_.cols() + c] = wtm_.matrix(r, c).real();
            im[r * wtm_.cols() + c] = wtm_.matrix(r, c).imag();
        }
    j["wtm"] = {{"rows", wtm_.rows()}, {"cols", wtm_.cols()}, {"indices", wtm_.grid.indices},
                {"aperture", wtm_.grid.aperture}, {"wavelength", wtm_.grid.wavelength},
                {"re", re}, {"im", im}};
    return j.dump();
}

MlpLearner MlpLearner::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    if (j.at("version").get<int>() != kSnapshotVersion)
        throw DomainError("unsupported learner snapshot version");
    MlpLearner m;
    m.dims_ = j.at("layer_dims").get<std::vector<int>>();
    m.lr_ = j.at("learning_rate").get<double>();
    m.constraint_ = j.at("constraint").get<std::string>() == "unit_norm" ? BeamConstraint::UnitNorm
                                                                         : BeamConstraint::UnitModulus;
    m.adam_ = {j.at("adam").at("beta1"), j.at("adam").at("beta2"), j.at("adam").at("eps")};
    const auto& w = j.at("wtm");
    const int rows = w.at("rows");
    const int cols = w.at("cols");
    const auto re = w.at("re").get<std::vector<double>>();
    const auto im = w.at("im").get<std::vector<double>>();
    m.wtm_.matrix.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.wtm_.matrix(r, c) = cplx(re[r * cols + c], im[r * cols + c]);
    m.wtm_.grid.indices = w.at("indices").get<std::vector<int>>();
    m.wtm_.grid.aperture = w.at("aperture");
    m.wtm_.grid.wavelength = w.at("wavelength");
    if (m.wtm_.grid.wavelength > 0) m.wtm_.grid.k0 = 2.0 * kPi / m.wtm_.grid.wavelength;
    m.layout();
    const auto p = j.at("params").get<std::vector<double>>();
    const auto am = j.at("adam_m").get<std::vector<double>>();
    const auto av = j.at("adam_v").get<std::vector<double>>();
    if (static_cast<long>(p.size()) != m.params_.size() || am.size() != p.size() || av.size() != p.size())
        throw DomainError("learner snapshot parameter count mismatch");
    m.params_ = Eigen::Map<const RVec>(p.data(), p.size());
    m.m_ = Eigen::Map<const RVec>(am.data(), am.size());
    m.v_ = Eigen::Map<const RVec>(av.data(), av.size());
    m.steps_ = j.at("steps").get<long>();
    return m;
}

}  // namespace stt
