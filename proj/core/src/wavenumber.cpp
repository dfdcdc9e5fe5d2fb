// SPDX-License-Identifier: Apache-2.0
#include "stt/wavenumber.hpp"

#include <cmath>
#include <string>

namespace stt {

int WavenumberGrid::position(int index) const {
    if (indices.empty() || index < first() || index > last())
        throw DomainError("wavenumber index " + std::to_string(index) + " outside grid");
    return index - first();
}

Wtm Wtm::from_matrix(CMat m) {
    Wtm w;
    w.grid.indices.resize(m.cols());
    for (int i = 0; i < m.cols(); ++i) w.grid.indices[i] = i;
    w.matrix = std::move(m);
    return w;
}

WavenumberGrid wavenumber_grid(double aperture, double wavelength) {
    if (!(aperture > 0) || !(wavelength > 0))
        throw DomainError("wavenumber_grid needs positive aperture and wavelength");
    // D/lambda is often an integer up to rounding; snap before ceil/floor.
    const double r = aperture / wavelength;
    const double snapped = std::abs(r - std::round(r)) < 1e-9 ? std::round(r) : r;
    WavenumberGrid g;
    g.aperture = aperture;
    g.wavelength = wavelength;
    g.k0 = 2.0 * kPi / wavelength;
    const int lo = static_cast<int>(std::ceil(-snapped));
    const int hi = static_cast<int>(std::floor(snapped));
    for (int i = lo; i <= hi; ++i) g.indices.push_back(i);
    return g;
}

Wtm build_wtm(const UlaGeometry& geom, const WavenumberGrid& grid) {
    if (std::abs(grid.aperture - geom.aperture) > 1e-9 * std::max(1.0, geom.aperture))
        throw DomainError("wavenumber grid aperture does not match array aperture");
    const int n = geom.count();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Wtm w;
    w.grid = grid;
    w.matrix.resize(n, grid.size());
    for (int c = 0; c < grid.size(); ++c) {
        const double kx = 2.0 * kPi * grid.indices[c] / grid.aperture;
        for (int r = 0; r < n; ++r) {
            const double x = (geom.positions[r] - geom.center).dot(geom.axis);
            w.matrix(r, c) = std::polar(scale, kx * x);
        }
    }
    return w;
}

Wtm build_wtm(const UlaGeometry& geom, double wavelength) {
    return build_wtm(geom, wavenumber_grid(geom.aperture, wavelength));
}

CMat to_wavenumber(const CMat& h, const Wtm& rx, const Wtm& tx) {
    if (h.rows() != rx.rows() || h.cols() != tx.rows())
        throw DomainError("to_wavenumber dimension mismatch");
    const double s = std::sqrt(static_cast<double>(h.rows()) * static_cast<double>(h.cols()));
    return rx.matrix.adjoint() * h * tx.matrix / s;
}

CMat from_wavenumber(const CMat& ha, const Wtm& rx, const Wtm& tx) {
    if (ha.rows() != rx.cols() || ha.cols() != tx.cols())
        throw DomainError("from_wavenumber dimension mismatch");
    const double s = std::sqrt(static_cast<double>(rx.rows()) * static_cast<double>(tx.rows()));
    return s * rx.matrix * ha * tx.matrix.adjoint();
}

Wtm truncate(const Wtm& wtm, int i_min, int i_max) {
    if (i_min > i_max) throw DomainError("truncate range is empty");
    const int a = wtm.grid.position(i_min);
    const int b = wtm.grid.position(i_max);
    Wtm out;
    out.grid = wtm.grid;
    out.grid.indices.assign(wtm.grid.indices.begin() + a, wtm.grid.indices.begin() + b + 1);
    out.matrix = wtm.matrix.middleCols(a, b - a + 1);
    out.truncated_range = std::make_pair(i_min, i_max);
    return out;
}

}  // namespace stt
