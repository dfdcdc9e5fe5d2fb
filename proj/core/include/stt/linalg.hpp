// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "stt/types.hpp"

namespace stt {

/// Modified Gram-Schmidt on the columns of a. Zero columns, and columns that lose all but
/// 1e-12 of their norm to projection, come out as zero.
CMat orthonormalize(const CMat& a);

/// Entry-wise phase projection to modulus 1/sqrt(n). Throws on an exact zero entry.
CVec unit_modulus(const CVec& v);

/// Scales v to unit 2-norm. Throws on the zero vector.
CVec unit_norm(const CVec& v);

/// (A)^{-1/2} for a Hermitian positive-definite matrix.
CMat hermitian_inv_sqrt(const CMat& a);

/// Columns of a with 2-norm above tol.
CMat nonzero_columns(const CMat& a, double tol = 1e-12);

/// Vector of i.i.d. CN(0, variance) samples.
CVec complex_noise(Rng& rng, int n, double variance);

}  // namespace stt
