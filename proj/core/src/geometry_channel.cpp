// SPDX-License-Identifier: Apache-2.0
#include "stt/geometry_channel.hpp"

#include <cmath>
#include <sstream>

namespace stt {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError(msg);
}

}  // namespace

void SystemConfig::validate() const {
    require(carrier_freq > 0, "carrier_freq must be positive");
    require(bandwidth > 0, "bandwidth must be positive");
    require(n_bs_antennas >= 1 && n_bs_antennas % 2 == 1, "n_bs_antennas must be odd and >= 1");
    require(n_ue_antennas >= 1 && n_ue_antennas % 2 == 1, "n_ue_antennas must be odd and >= 1");
    require(spacing_bs() > 0, "antenna_spacing_bs must be positive");
    require(spacing_ue() > 0, "antenna_spacing_ue must be positive");
    require(link_distance > 0, "link_distance must be positive");
    require(n_streams >= 1, "n_streams must be >= 1");
    require(n_nlos_paths >= 0, "n_nlos_paths must be >= 0");
    require(scattering_loss > 0 && scattering_loss <= 1, "scattering_loss must be in (0, 1]");
    require(tx_gain > 0 && rx_gain > 0, "antenna gains must be positive");
    require(tx_power_bs > 0 && tx_power_ue > 0, "transmit powers must be positive");
    require(noise_density >= 0, "noise_density must be nonnegative");
    require(absorption_coeff >= 0, "absorption_coeff must be nonnegative");
    require(speed_of_light > 0, "speed_of_light must be positive");
    require(scatterer_padding >= 0, "scatterer_padding must be nonnegative");
    if (enforce_near_field) {
        const double d_b = (n_bs_antennas - 1) * spacing_bs();
        const double d_u = (n_ue_antennas - 1) * spacing_ue();
        const double rd = rayleigh_distance(d_b + d_u, wavelength());
        if (!(link_distance < rd)) {
            std::ostringstream os;
            os << "link_distance " << link_distance << " m is not below the Rayleigh distance "
               << rd << " m";
            throw DomainError(os.str());
        }
    }
}

UlaGeometry build_ula(int count, double spacing, const Vec3& center, const Vec3& axis) {
    require(count >= 1 && count % 2 == 1, "array count must be odd and >= 1");
    require(spacing > 0, "array spacing must be positive");
    require(axis.y() == 0.0, "array axis must lie in the xz plane");
    require(axis.norm() > 0, "array axis must be nonzero");
    UlaGeometry g;
    g.center = center;
    g.axis = axis.normalized();
    g.spacing = spacing;
    g.aperture = (count - 1) * spacing;
    const int half = (count - 1) / 2;
    g.positions.reserve(count);
    for (int i = -half; i <= half; ++i) g.positions.push_back(center + i * spacing * g.axis);
    return g;
}

UlaGeometry bs_array(const SystemConfig& cfg) {
    return build_ula(cfg.n_bs_antennas, cfg.spacing_bs(), Vec3::Zero(), Vec3::UnitX());
}

UlaGeometry ue_array(const SystemConfig& cfg) {
    return build_ula(cfg.n_ue_antennas, cfg.spacing_ue(), Vec3(0.0, 0.0, cfg.link_distance),
                     Vec3::UnitX());
}

double rayleigh_distance(double aperture_sum, double wavelength) {
    return 2.0 * aperture_sum * aperture_sum / wavelength;
}

double pathloss(double freq, double dist, double absorption) {
    if (!(dist > 0)) throw DomainError("pathloss distance must be positive");
    const double a = 4.0 * kPi * freq * dist / kSpeedOfLight;
    return a * a * std::exp(absorption * dist);
}

double power_gain(const SystemConfig& cfg, double dist, double scatter_loss) {
    return scatter_loss * cfg.tx_gain * cfg.rx_gain /
           pathloss(cfg.carrier_freq, dist, cfg.absorption_coeff);
}

cplx channel_gain(const SystemConfig& cfg, double dist, double scatter_loss) {
    return {std::sqrt(power_gain(cfg, dist, scatter_loss)), 0.0};
}

CVec array_response(const UlaGeometry& geom, const Vec3& point, double k0) {
    CVec b(geom.count());
    for (int n = 0; n < geom.count(); ++n) {
        const double d = (point - geom.positions[n]).norm();
        if (d == 0.0) throw DomainError("array_response point coincides with an antenna");
        b(n) = std::polar(1.0, -k0 * d);
    }
    return b;
}

Box scatterer_region(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue) {
    const double pad = cfg.scatterer_padding;
    const double half_x = 0.5 * std::max(bs.aperture, ue.aperture) + pad;
    Box b;
    b.lo = Vec3(-half_x, -pad, std::min(bs.center.z(), ue.center.z()));
    b.hi = Vec3(half_x, pad, std::max(bs.center.z(), ue.center.z()));
    return b;
}

ScattererSet sample_scatterers(const SystemConfig& cfg, const UlaGeometry& bs,
                               const UlaGeometry& ue, const Box& region, Rng& rng) {
    ScattererSet s;
    const int l = cfg.n_nlos_paths;
    s.points.reserve(l);
    s.gains.reserve(l);
    for (int i = 0; i < l; ++i) {
        Vec3 q;
        for (int k = 0; k < 3; ++k) {
            std::uniform_real_distribution<double> u(region.lo(k), region.hi(k));
            q(k) = region.lo(k) < region.hi(k) ? u(rng) : region.lo(k);
        }
        const double r = (q - bs.center).norm() + (q - ue.center).norm();
        s.points.push_back(q);
        s.gains.push_back(channel_gain(cfg, r, cfg.scattering_loss));
    }
    return s;
}

CMat los_channel(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue) {
    const double k0 = cfg.k0();
    const cplx beta = channel_gain(cfg, (ue.center - bs.center).norm());
    CMat h(ue.count(), bs.count());
    for (int n = 0; n < bs.count(); ++n) {
        for (int m = 0; m < ue.count(); ++m) {
            const double d = (ue.positions[m] - bs.positions[n]).norm();
            if (d == 0.0) throw DomainError("arrays overlap");
            h(m, n) = beta * std::polar(1.0, -k0 * d);
        }
    }
    return h;
}

CMat nlos_channel(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue,
                  const ScattererSet& scat) {
    const double k0 = cfg.k0();
    CMat h = CMat::Zero(ue.count(), bs.count());
    for (int l = 0; l < scat.size(); ++l) {
        const CVec bu = array_response(ue, scat.points[l], k0);
        const CVec bb = array_response(bs, scat.points[l], k0);
        h.noalias() += scat.gains[l] * bu * bb.transpose();
    }
    return h;
}

ChannelMatrix synthesize_channel(const SystemConfig& cfg, const UlaGeometry& bs,
                                 const UlaGeometry& ue, const ScattererSet& scat) {
    ChannelMatrix c;
    c.los_part = los_channel(cfg, bs, ue);
    c.nlos_part = nlos_channel(cfg, bs, ue, scat);
    c.h = c.los_part + c.nlos_part;
    c.gain = channel_gain(cfg, (ue.center - bs.center).norm());
    return c;
}

ChannelMatrix random_channel(const SystemConfig& cfg, Rng& rng) {
    const UlaGeometry bs = bs_array(cfg);
    const UlaGeometry ue = ue_array(cfg);
    const ScattererSet scat = sample_scatterers(cfg, bs, ue, scatterer_region(cfg, bs, ue), rng);
    return synthesize_channel(cfg, bs, ue, scat);
}

double noise_power(const SystemConfig& cfg) { return cfg.noise_density * cfg.bandwidth; }

}  // namespace stt
