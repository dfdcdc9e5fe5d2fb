// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace stt {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Rng = std::mt19937_64;

constexpr double kPi = 3.14159265358979323846;
constexpr double kSpeedOfLight = 299792458.0;

/// Raised for violated preconditions on numeric inputs.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numeric routine cannot produce a meaningful result.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Derives a decorrelated 64-bit seed from a master seed and a stream index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Draws a circularly-symmetric complex Gaussian sample with the given variance.
cplx complex_normal(Rng& rng, double variance);

}  // namespace stt
