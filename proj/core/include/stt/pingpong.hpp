// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stt/geometry_channel.hpp"

namespace stt {

/// Reciprocal ping-pong pilot exchange over a fixed channel.
class PingPongSim {
public:
    PingPongSim(CMat h, double noise_variance, double power_bs, double power_ue,
                std::uint64_t seed);
    PingPongSim(const ChannelMatrix& ch, const SystemConfig& cfg, std::uint64_t seed);

    /// sqrt(P_B) H p + n_U
    CVec dl_pilot(const CVec& p);
    /// sqrt(P_U) H^T conj(s) + n_B
    CVec ul_pilot(const CVec& s);

    /// Block pilots: each column carries power/cols of the budget.
    CMat dl_block(const CMat& p);
    CMat ul_block(const CMat& s);

    const CMat& channel() const { return h_; }
    double noise_variance() const { return sigma2_; }
    double power_bs() const { return pb_; }
    double power_ue() const { return pu_; }
    int n_bs() const { return static_cast<int>(h_.cols()); }
    int n_ue() const { return static_cast<int>(h_.rows()); }

    long dl_count() const { return dl_count_; }
    long ul_count() const { return ul_count_; }
    /// Ping-pong rounds so far (a round is one DL plus one UL exchange).
    long rounds() const { return std::max(dl_count_, ul_count_); }

private:
    CMat h_;
    double sigma2_;
    double pb_;
    double pu_;
    Rng rng_;
    long dl_count_ = 0;
    long ul_count_ = 0;
};

}  // namespace stt
