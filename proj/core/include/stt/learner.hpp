// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "stt/wavenumber.hpp"

namespace stt {

enum class BeamConstraint { UnitModulus, UnitNorm };
enum class Side { DL, UL };

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct ForwardResult {
    CVec beam_raw;  // Phi^(e) s'
    CVec beam;      // constrained beam
};

struct StepResult {
    CVec beam;
    double loss = 0.0;
};

/// Normalizes a raw beam under the constraint; exact zeros become 1e-12.
CVec normalize_beam(const CVec& raw, BeamConstraint c);

/// |b^H y| for DL, |b^T y| for UL, with b = normalize_beam(beam_raw).
double beam_loss(const CVec& beam_raw, const CVec& y, Side side,
                 BeamConstraint c = BeamConstraint::UnitModulus);

/// Real MLP over stacked (Re y, Im y) whose complex output is projected through a WTM.
class MlpLearner {
public:
    MlpLearner(Wtm wtm, std::vector<int> hidden, double learning_rate, BeamConstraint constraint,
               Rng& rng, AdamParams adam = {});

    ForwardResult forward(const CVec& y) const;
    double loss(const CVec& y, Side side) const;

    /// Gradient of the loss with respect to the flat parameter vector.
    RVec gradient(const CVec& y, Side side, double* loss_out = nullptr) const;

    /// Forward, loss, one Adam ascent step. Returns the pre-update beam and loss.
    StepResult grad_step(const CVec& y, Side side);

    void decay_learning_rate(double alpha, double floor = 0.001);
    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr);

    const std::vector<int>& layer_dims() const { return dims_; }
    int parameter_count() const { return static_cast<int>(params_.size()); }
    const RVec& parameters() const { return params_; }
    void set_parameters(const RVec& p);
    long step_count() const { return steps_; }

    const Wtm& wtm() const { return wtm_; }
    BeamConstraint constraint() const { return constraint_; }

    /// Smallest |pre-activation| over the hidden layers (distance to a ReLU kink).
    double min_abs_preactivation(const CVec& y) const;

    std::string to_json() const;
    static MlpLearner from_json(const std::string& text);

private:
    MlpLearner() = default;
    struct Cache {
        std::vector<RVec> pre;
        std::vector<RVec> act;
    };
    RVec mlp(const RVec& x, Cache* cache) const;
    int w_offset(int layer) const { return offsets_[2 * layer]; }
    int b_offset(int layer) const { return offsets_[2 * layer + 1]; }
    void layout();

    Wtm wtm_;
    std::vector<int> dims_;
    std::vector<int> offsets_;
    RVec params_;
    RVec m_;
    RVec v_;
    long steps_ = 0;
    double lr_ = 0.005;
    BeamConstraint constraint_ = BeamConstraint::UnitModulus;
    AdamParams adam_;
};

}  // namespace stt
