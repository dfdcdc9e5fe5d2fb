// SPDX-License-Identifier: Apache-2.0
#include "stt/sensing.hpp"

#include <cmath>

#include "stt/linalg.hpp"

namespace stt {

void SensingConfig::validate() const {
    if (rounds < 1) throw DomainError("sensing rounds must be >= 1");
    auto frac_ok = [](double f) { return f > 0.0 && f < 1.0; };
    if (!frac_ok(threshold_fraction_dl) || !frac_ok(threshold_fraction_ul))
        throw DomainError("sensing threshold fractions must lie in (0, 1)");
    if (pilot_dl && pilot_dl->cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("pilot_dl must be nonzero");
    if (pilot_ul && pilot_ul->cwiseAbs().maxCoeff() == 0.0)
        throw DomainError("pilot_ul must be nonzero");
}

CVec sensing_beam(const Wtm& wtm, const RVec& c) {
    if (c.size() != wtm.cols()) throw DomainError("sensing pilot length must match grid size");
    const CVec raw = wtm.matrix * c.cast<cplx>();
    try {
        return unit_modulus(raw);
    } catch (const NumericError&) {
        throw DomainError("degenerate sensing pilot: Phi c has a zero entry");
    }
}

CVec wavenumber_gain(const CVec& y, const Wtm& wtm) {
    if (y.size() != wtm.rows()) throw DomainError("wavenumber_gain dimension mismatch");
    return wtm.matrix.adjoint() * y;
}

RVec average_gains(const std::vector<CVec>& w_list) {
    if (w_list.empty()) throw DomainError("average_gains needs at least one vector");
    CVec sum = CVec::Zero(w_list.front().size());
    for (const auto& w : w_list) {
        if (w.size() != sum.size()) throw DomainError("average_gains length mismatch");
        sum += w;
    }
    return sum.cwiseAbs() / static_cast<double>(w_list.size());
}

std::pair<int, int> detect_boundaries(const RVec& w_hat, const std::vector<int>& indices,
                                      double threshold_fraction) {
    if (w_hat.size() != static_cast<long>(indices.size()) || w_hat.size() == 0)
        throw DomainError("detect_boundaries grid mismatch");
    const double wmax = w_hat.maxCoeff();
    if (!(wmax > 0)) throw DomainError("detect_boundaries needs a positive maximum");
    const double gamma = threshold_fraction * wmax;
    int lo = -1;
    int hi = -1;
    for (int k = 0; k < w_hat.size(); ++k) {
        if (w_hat(k) > gamma) {
            if (lo < 0) lo = k;
            hi = k;
        }
    }
    if (lo < 0) throw DomainError("no wavenumber gain exceeds the threshold");
    return {indices[lo], indices[hi]};
}

SensingResult run_sensing(PingPongSim& sim, const Wtm& full_ue, const Wtm& full_bs,
                          const SensingConfig& scfg) {
    scfg.validate();
    const RVec c_dl = scfg.pilot_dl.value_or(RVec::Ones(full_bs.cols()));
    const RVec c_ul = scfg.pilot_ul.value_or(RVec::Ones(full_ue.cols()));
    const CVec p = sensing_beam(full_bs, c_dl);
    const CVec s = sensing_beam(full_ue, c_ul);

    std::vector<CVec> w_dl;
    std::vector<CVec> w_ul;
    w_dl.reserve(scfg.rounds);
    w_ul.reserve(scfg.rounds);
    for (int t = 0; t < scfg.rounds; ++t) {
        w_dl.push_back(wavenumber_gain(sim.dl_pilot(p), full_ue));
        w_ul.push_back(wavenumber_gain(sim.ul_pilot(s), full_bs));
    }

    SensingResult r;
    r.avg_gain_dl = average_gains(w_dl);
    r.avg_gain_ul = average_gains(w_ul);
    r.ue_range = detect_boundaries(r.avg_gain_dl, full_ue.grid.indices, scfg.threshold_fraction_dl);
    r.bs_range = detect_boundaries(r.avg_gain_ul, full_bs.grid.indices, scfg.threshold_fraction_ul);
    r.wtm_ue = truncate(full_ue, r.ue_range.first, r.ue_range.second);
    r.wtm_bs = truncate(full_bs, r.bs_range.first, r.bs_range.second);
    return r;
}

}  // namespace stt
