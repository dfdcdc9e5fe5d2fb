// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stt/pingpong.hpp"
#include "stt/wavenumber.hpp"

namespace stt {

struct SensingConfig {
    int rounds = 10;                       // T_s
    std::optional<RVec> pilot_dl;          // over the BS grid, default all-ones
    std::optional<RVec> pilot_ul;          // over the UE grid, default all-ones
    double threshold_fraction_dl = 0.1;
    double threshold_fraction_ul = 0.1;

    void validate() const;
};

struct SensingResult {
    RVec avg_gain_dl;                      // over the UE grid
    RVec avg_gain_ul;                      // over the BS grid
    std::pair<int, int> ue_range;
    std::pair<int, int> bs_range;
    Wtm wtm_ue;
    Wtm wtm_bs;
};

/// Phi c normalized entry-wise to modulus 1/sqrt(rows).
CVec sensing_beam(const Wtm& wtm, const RVec& c);

CVec wavenumber_gain(const CVec& y, const Wtm& wtm);
RVec average_gains(const std::vector<CVec>& w_list);
std::pair<int, int> detect_boundaries(const RVec& w_hat, const std::vector<int>& indices,
                                      double threshold_fraction);

/// T_s interleaved DL/UL sensing rounds; returns detected ranges and truncated WTMs.
SensingResult run_sensing(PingPongSim& sim, const Wtm& full_ue, const Wtm& full_bs,
                          const SensingConfig& scfg);

}  // namespace stt
