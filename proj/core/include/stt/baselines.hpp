// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "stt/pingpong.hpp"
#include "stt/training.hpp"

namespace stt {

/// Top singular vectors, oriented so that S^H H P is diagonal and nonnegative.
/// Lambda is water-filled when sigma2 > 0, otherwise an equal split of total_power.
BeamformerSet svd_oracle(const CMat& h, int n_streams, double total_power = 1.0,
                         double sigma2 = 0.0);

using RoundCallback = std::function<void(int round, const CMat& s, const CMat& p)>;

/// Blind block power iteration through ping-pong pilots.
BeamformerSet power_method(PingPongSim& sim, int n_streams, int rounds, Rng& rng,
                           const std::optional<CMat>& initial_p = std::nullopt,
                           const RoundCallback& on_round = {});

/// Far-field steering vector exp(j pi n u) / sqrt(count) for a half-wavelength ULA.
CVec steering_vector(int count, double u);

struct CodebookNode {
    int level = 0;
    double lo = -1.0;  // sin-angle interval [lo, hi)
    double hi = 1.0;
    CVec beam;         // gain toward u is |beam^H a(u)|
};

struct HierarchicalCodebook {
    int count = 0;
    int depth = 0;
    std::vector<std::vector<CodebookNode>> levels;  // levels[0] is the quasi-omni root

    const CodebookNode& node(int level, int index) const { return levels.at(level).at(index); }
    int leaf_count() const { return 1 << depth; }
};

int default_codebook_depth(int count);
HierarchicalCodebook build_hierarchical_codebook(int count, int depth);

struct SearchResult {
    CVec s;
    CVec p;
    int pilots_used = 0;
    int bs_leaf = 0;
    int ue_leaf = 0;
};

/// Coarse-to-fine search, BS child then UE child per level.
SearchResult hierarchical_search(PingPongSim& sim, const HierarchicalCodebook& bs_tree,
                                 const HierarchicalCodebook& ue_tree);

}  // namespace stt
