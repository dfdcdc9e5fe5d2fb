// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "stt/types.hpp"

namespace stt {

struct SystemConfig {
    double carrier_freq = 28e9;          // Hz
    double bandwidth = 100e6;            // Hz
    int n_bs_antennas = 255;             // N, odd
    int n_ue_antennas = 255;             // M, odd
    std::optional<double> antenna_spacing_bs;  // meters, default lambda/2
    std::optional<double> antenna_spacing_ue;
    double link_distance = 15.0;         // meters
    int n_streams = 1;
    int n_nlos_paths = 3;
    double scattering_loss = db_to_linear(-15.0);
    double tx_gain = db_to_linear(15.0);
    double rx_gain = db_to_linear(5.0);
    double tx_power_bs = dbm_to_watts(20.0);
    double tx_power_ue = dbm_to_watts(20.0);
    double noise_density = dbm_to_watts(-174.0);  // W/Hz
    double absorption_coeff = 0.0;       // 1/m
    double speed_of_light = kSpeedOfLight;
    bool enforce_near_field = true;
    double scatterer_padding = 0.5;      // meters

    double wavelength() const { return speed_of_light / carrier_freq; }
    double k0() const { return 2.0 * kPi / wavelength(); }
    double spacing_bs() const { return antenna_spacing_bs.value_or(0.5 * wavelength()); }
    double spacing_ue() const { return antenna_spacing_ue.value_or(0.5 * wavelength()); }

    /// Throws DomainError on the first violated invariant.
    void validate() const;
};

struct UlaGeometry {
    std::vector<Vec3> positions;
    Vec3 center = Vec3::Zero();
    Vec3 axis = Vec3::UnitX();
    double spacing = 0.0;
    double aperture = 0.0;

    int count() const { return static_cast<int>(positions.size()); }
};

struct Box {
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
};

struct ScattererSet {
    std::vector<Vec3> points;
    std::vector<cplx> gains;

    int size() const { return static_cast<int>(points.size()); }
};

struct ChannelMatrix {
    CMat h;
    CMat los_part;
    CMat nlos_part;
    cplx gain{0.0, 0.0};

    int rows() const { return static_cast<int>(h.rows()); }
    int cols() const { return static_cast<int>(h.cols()); }
};

UlaGeometry build_ula(int count, double spacing, const Vec3& center, const Vec3& axis);

/// BS array at the origin and UE array at (0, 0, d_BU), both along x.
UlaGeometry bs_array(const SystemConfig& cfg);
UlaGeometry ue_array(const SystemConfig& cfg);

double rayleigh_distance(double aperture_sum, double wavelength);
double pathloss(double freq, double dist, double absorption);
double power_gain(const SystemConfig& cfg, double dist, double scatter_loss = 1.0);

/// Amplitude gain sqrt(scatter_loss * G_t * G_r / pathloss), zero phase.
cplx channel_gain(const SystemConfig& cfg, double dist, double scatter_loss = 1.0);

CVec array_response(const UlaGeometry& geom, const Vec3& point, double k0);

/// Default placement region between the two arrays.
Box scatterer_region(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue);

ScattererSet sample_scatterers(const SystemConfig& cfg, const UlaGeometry& bs,
                               const UlaGeometry& ue, const Box& region, Rng& rng);

CMat los_channel(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue);
CMat nlos_channel(const SystemConfig& cfg, const UlaGeometry& bs, const UlaGeometry& ue,
                  const ScattererSet& scat);
ChannelMatrix synthesize_channel(const SystemConfig& cfg, const UlaGeometry& bs,
                                 const UlaGeometry& ue, const ScattererSet& scat);

/// Draws scatterers in the default region and synthesizes the channel.
ChannelMatrix random_channel(const SystemConfig& cfg, Rng& rng);

double noise_power(const SystemConfig& cfg);

}  // namespace stt
