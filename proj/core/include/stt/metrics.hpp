// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "stt/geometry_channel.hpp"

namespace stt {

/// log2 det(I + C^{-1} S^H H P L L^H P^H H^H S), C = sigma2 S^H S.
double spectral_efficiency(const CMat& h, const CMat& s, const CMat& p, const CMat& lambda,
                           double sigma2);

struct WaterFilling {
    RVec powers;  // lambda_i^2
    double mu = 0.0;
};

/// powers_i = max(0, mu - sigma2 / gain_i) with sum(powers) = total_power.
WaterFilling water_filling(const RVec& gains, double total_power, double sigma2);

/// SE of fixed beams with water-filled power over the whitened equivalent channel.
/// Zero columns (untrained beams) are dropped.
double evaluate_se(const CMat& h, const CMat& s, const CMat& p, double total_power,
                   double sigma2);

/// Optimal SE from the top-n singular values with water-filling.
double optimal_se(const CMat& h, int n_streams, double total_power, double sigma2);

double edof(const CMat& h);

struct PowerModel {
    double p_rf = 0.2;
    double p_ps = 0.03;
    double p_bb = 0.3;
    int n_rf_bs = 0;
    int n_rf_ue = 0;
    int n_ps_bs = 0;
    int n_ps_ue = 0;

    static PowerModel hybrid(int n_bs, int n_ue, int n_streams);
    static PowerModel fully_digital(int n_bs, int n_ue);

    double total(double power_bs, double power_ue) const;
};

double energy_efficiency(double se, const PowerModel& pm, double power_bs, double power_ue);

/// |beam^H a(v)|^2 over an xz grid (rows: z, cols: x), normalized to a maximum of 1.
RMat beam_gain_map(const CVec& beam, const UlaGeometry& geom, const std::vector<double>& xs,
                   const std::vector<double>& zs, double k0);

/// Centroid (x, z) of cells at or above the given quantile of a gain map.
Eigen::Vector2d top_quantile_centroid(const RMat& map, const std::vector<double>& xs,
                                      const std::vector<double>& zs, double quantile = 0.9);

}  // namespace stt
