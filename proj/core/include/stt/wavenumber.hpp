// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "stt/geometry_channel.hpp"

namespace stt {

struct WavenumberGrid {
    std::vector<int> indices;
    double aperture = 0.0;
    double wavelength = 0.0;
    double k0 = 0.0;

    int size() const { return static_cast<int>(indices.size()); }
    int first() const { return indices.front(); }
    int last() const { return indices.back(); }
    /// Column position of a grid index; throws if absent.
    int position(int index) const;
};

struct Wtm {
    CMat matrix;
    WavenumberGrid grid;
    std::optional<std::pair<int, int>> truncated_range;

    int rows() const { return static_cast<int>(matrix.rows()); }
    int cols() const { return static_cast<int>(matrix.cols()); }

    /// Wraps an arbitrary matrix with a synthetic 0..cols-1 grid (toy problems).
    static Wtm from_matrix(CMat m);
};

WavenumberGrid wavenumber_grid(double aperture, double wavelength);
Wtm build_wtm(const UlaGeometry& geom, const WavenumberGrid& grid);
Wtm build_wtm(const UlaGeometry& geom, double wavelength);

CMat to_wavenumber(const CMat& h, const Wtm& rx, const Wtm& tx);
CMat from_wavenumber(const CMat& ha, const Wtm& rx, const Wtm& tx);
Wtm truncate(const Wtm& wtm, int i_min, int i_max);

}  // namespace stt
