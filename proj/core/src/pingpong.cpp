// SPDX-License-Identifier: Apache-2.0
#include "stt/pingpong.hpp"

#include <cmath>

#include "stt/linalg.hpp"

namespace stt {

PingPongSim::PingPongSim(CMat h, double noise_variance, double power_bs, double power_ue,
                         std::uint64_t seed)
    : h_(std::move(h)), sigma2_(noise_variance), pb_(power_bs), pu_(power_ue), rng_(seed) {
    if (sigma2_ < 0) throw DomainError("noise variance must be nonnegative");
}

PingPongSim::PingPongSim(const ChannelMatrix& ch, const SystemConfig& cfg, std::uint64_t seed)
    : PingPongSim(ch.h, noise_power(cfg), cfg.tx_power_bs, cfg.tx_power_ue, seed) {}

CVec PingPongSim::dl_pilot(const CVec& p) {
    if (p.size() != h_.cols()) throw DomainError("dl_pilot beam length mismatch");
    ++dl_count_;
    CVec y = std::sqrt(pb_) * (h_ * p);
    if (sigma2_ > 0) y += complex_noise(rng_, n_ue(), sigma2_);
    return y;
}

CVec PingPongSim::ul_pilot(const CVec& s) {
    if (s.size() != h_.rows()) throw DomainError("ul_pilot beam length mismatch");
    ++ul_count_;
    CVec y = std::sqrt(pu_) * (h_.transpose() * s.conjugate());
    if (sigma2_ > 0) y += complex_noise(rng_, n_bs(), sigma2_);
    return y;
}

CMat PingPongSim::dl_block(const CMat& p) {
    if (p.rows() != h_.cols()) throw DomainError("dl_block beam length mismatch");
    ++dl_count_;
    const double a = std::sqrt(pb_ / static_cast<double>(p.cols()));
    CMat y = a * (h_ * p);
    if (sigma2_ > 0)
        for (int k = 0; k < y.cols(); ++k) y.col(k) += complex_noise(rng_, n_ue(), sigma2_);
    return y;
}

CMat PingPongSim::ul_block(const CMat& s) {
    if (s.rows() != h_.rows()) throw DomainError("ul_block beam length mismatch");
    ++ul_count_;
    const double a = std::sqrt(pu_ / static_cast<double>(s.cols()));
    CMat y = a * (h_.transpose() * s.conjugate());
    if (sigma2_ > 0)
        for (int k = 0; k < y.cols(); ++k) y.col(k) += complex_noise(rng_, n_bs(), sigma2_);
    return y;
}

}  // namespace stt
