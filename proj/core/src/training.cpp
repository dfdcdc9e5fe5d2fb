// SPDX-License-Identifier: Apache-2.0
#include "stt/training.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "stt/linalg.hpp"
#include "stt/metrics.hpp"

namespace stt {

void TrainingConfig::validate() const {
    if (rounds < 1) throw DomainError("training rounds must be >= 1");
    if (!(tolerance > 0)) throw DomainError("convergence tolerance must be positive");
    if (!(decay > 0 && decay <= 1)) throw DomainError("decay must lie in (0, 1]");
    if (min_rounds_per_beam < 1) throw DomainError("min_rounds_per_beam must be >= 1");
    if (!(learning_rate > 0)) throw DomainError("learning rate must be positive");
    if (!(learning_rate_floor > 0)) throw DomainError("learning rate floor must be positive");
}

Learners make_learners(const SensingResult& sres, const TrainingConfig& tcfg, Rng& rng) {
    MlpLearner ue(sres.wtm_ue, tcfg.hidden, tcfg.learning_rate, tcfg.constraint(), rng);
    MlpLearner bs(sres.wtm_bs, tcfg.hidden, tcfg.learning_rate, tcfg.constraint(), rng);
    return {std::move(ue), std::move(bs)};
}

CMat deflate(const CMat& r, const CVec& v) {
    if (r.rows() != r.cols() || r.rows() != v.size()) throw DomainError("deflate dimension mismatch");
    const double n = v.norm();
    if (std::abs(n - 1.0) > 1e-9) {
        if (n == 0.0) throw DomainError("deflate with a zero vector");
        const CVec u = v / n;
        return r - u * u.adjoint();
    }
    return r - v * v.adjoint();
}

double convergence_ratio(double u_now, double u_prev) {
    if (!(u_now > 0)) return std::numeric_limits<double>::quiet_NaN();
    return (u_now - u_prev) / u_now;
}

namespace {

// Direction of v inside the range of projector r, or empty if none is left.
CVec projected_direction(const CMat& r, const CVec& v) {
    const CVec w = r * v;
    const double n = w.norm();
    return n > 1e-12 ? CVec(w / n) : CVec();
}

}  // namespace

MultiBeamResult run_multi_beam(PingPongSim& sim, int n_streams, const TrainingConfig& tcfg,
                               Learners& learners, Rng* reinit_rng) {
    tcfg.validate();
    const int m = sim.n_ue();
    const int n = sim.n_bs();
    if (n_streams < 1) throw DomainError("n_streams must be >= 1");
    if (n_streams > std::min(learners.ue.wtm().cols(), learners.bs.wtm().cols()))
        throw DomainError("n_streams exceeds the detected sub-space dimension");
    if (learners.ue.wtm().rows() != m || learners.bs.wtm().rows() != n)
        throw DomainError("learner dimensions do not match the channel");

    MultiBeamResult out;
    BeamformerSet& bf = out.beams;
    bf.hybrid = !tcfg.fully_digital;
    bf.s = CMat::Zero(m, n_streams);
    bf.p = CMat::Zero(n, n_streams);
    CMat ru = CMat::Identity(m, m);
    CMat rb = CMat::Identity(n, n);
    bool deflated = false;

    const CMat& h = sim.channel();
    const double pb = sim.power_bs();
    const double sigma2 = sim.noise_variance();
    auto snapshot_se = [&]() {
        return sigma2 > 0 ? evaluate_se(h, bf.s, bf.p, pb, sigma2) : 0.0;
    };

    // BS starts from a zero input; no pilot is spent.
    CVec p = learners.bs.forward(CVec::Zero(n)).beam;
    out.trace.records.push_back(TraceRecord{0, 1, 0.0, 0.0, 0.0, 0.0, 0.0});

    int beam = 0;
    int in_beam = 0;
    double u_prev = 0.0;
    for (int t = 1; t <= tcfg.rounds; ++t) {
        const CVec y_dl = sim.dl_pilot(p);
        const StepResult su = learners.ue.grad_step(deflated ? CVec(ru * y_dl) : y_dl, Side::DL);
        const CVec y_ul = sim.ul_pilot(su.beam);
        const CVec in_bs = deflated ? CVec(rb * y_ul) : y_ul;
        const StepResult sb = learners.bs.grad_step(in_bs, Side::UL);

        bf.s.col(beam) = su.beam;
        bf.p.col(beam) = sb.beam;
        const double u = su.loss * su.loss;
        const double eps = convergence_ratio(u, u_prev);
        u_prev = u;
        ++in_beam;

        TraceRecord rec;
        rec.t = t;
        rec.beam_index = beam + 1;
        rec.loss_dl = su.loss;
        rec.loss_ul = sb.loss;
        rec.utility = std::norm(su.beam.dot(h * sb.beam));
        rec.epsilon = eps;
        rec.se = snapshot_se();
        out.trace.records.push_back(rec);
        p = sb.beam;

        const bool converged = std::abs(eps) < tcfg.tolerance;
        if (beam + 1 < n_streams && in_beam >= tcfg.min_rounds_per_beam && converged) {
            const CVec vu = projected_direction(ru, su.beam);
            const CVec vb = projected_direction(rb, sb.beam.conjugate());
            if (vu.size() == 0 || vb.size() == 0) continue;
            ru = deflate(ru, vu);
            rb = deflate(rb, vb);
            deflated = true;
            learners.ue.decay_learning_rate(tcfg.decay, tcfg.learning_rate_floor);
            learners.bs.decay_learning_rate(tcfg.decay, tcfg.learning_rate_floor);
            if (tcfg.reinit_per_beam && reinit_rng) {
                const double lr_u = learners.ue.learning_rate();
                const double lr_b = learners.bs.learning_rate();
                learners.ue = MlpLearner(learners.ue.wtm(), tcfg.hidden, lr_u, tcfg.constraint(), *reinit_rng);
                learners.bs = MlpLearner(learners.bs.wtm(), tcfg.hidden, lr_b, tcfg.constraint(), *reinit_rng);
            }
            ++beam;
            in_beam = 0;
            u_prev = 0.0;
            out.trace.switch_rounds.push_back(t);
            // next DL beam from the deflated last UL observation
            p = learners.bs.forward(rb * y_ul).beam;
        }
    }

    bf.trained = beam + 1;
    bf.lambda = RVec::Zero(n_streams);
    if (sigma2 > 0) {
        const CMat sk = bf.s.leftCols(bf.trained);
        const CMat pk = bf.p.leftCols(bf.trained);
        const CMat w = hermitian_inv_sqrt(sk.adjoint() * sk);
        const RVec gains = (w * sk.adjoint() * h * pk).diagonal().cwiseAbs2();
        if (gains.maxCoeff() > 0)
            bf.lambda.head(bf.trained) = water_filling(gains, pb, sigma2).powers.cwiseSqrt();
    }
    return out;
}

SingleBeamResult run_single_beam(PingPongSim& sim, const TrainingConfig& tcfg, Learners& learners) {
    MultiBeamResult r = run_multi_beam(sim, 1, tcfg, learners);
    return {r.beams.s.col(0), r.beams.p.col(0), std::move(r.trace)};
}

void write_trace_csv(std::ostream& os, const TrainingTrace& trace, int trial, bool header) {
    if (header) os << "trial,t,phase,beam_index,loss_dl,loss_ul,utility,epsilon,se_bits_per_hz\n";
    const auto old = os.precision(12);
    for (const auto& r : trace.records) {
        os << trial << ',' << r.t << ',' << (r.t == 0 ? "init" : "train") << ',' << r.beam_index
           << ',' << r.loss_dl << ',' << r.loss_ul << ',' << r.utility << ',' << r.epsilon << ','
           << r.se << '\n';
    }
    os.precision(old);
}

}  // namespace stt
