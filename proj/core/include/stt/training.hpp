// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "stt/learner.hpp"
#include "stt/pingpong.hpp"
#include "stt/sensing.hpp"

namespace stt {

struct TrainingConfig {
    int rounds = 125;                  // T_a
    double tolerance = 0.001;          // epsilon_toler
    double decay = 0.99;               // alpha
    int min_rounds_per_beam = 5;
    bool fully_digital = false;
    bool reinit_per_beam = false;
    double learning_rate = 0.005;
    double learning_rate_floor = 0.001;
    std::vector<int> hidden = {128, 64};

    void validate() const;
    BeamConstraint constraint() const {
        return fully_digital ? BeamConstraint::UnitNorm : BeamConstraint::UnitModulus;
    }
};

struct BeamformerSet {
    CMat s;           // M x N_s
    CMat p;           // N x N_s
    RVec lambda;      // diagonal of Lambda
    bool hybrid = true;
    int trained = 0;  // beams with nonzero columns
};

struct TraceRecord {
    int t = 0;
    int beam_index = 0;
    double loss_dl = 0.0;
    double loss_ul = 0.0;
    double utility = 0.0;
    double epsilon = 0.0;
    double se = 0.0;
};

struct TrainingTrace {
    std::vector<TraceRecord> records;
    std::vector<int> switch_rounds;
};

struct Learners {
    MlpLearner ue;
    MlpLearner bs;
};

Learners make_learners(const SensingResult& sres, const TrainingConfig& tcfg, Rng& rng);

/// R - v v^H. A v whose norm is off by more than 1e-9 is renormalized first.
CMat deflate(const CMat& r, const CVec& v);

/// (u_now - u_prev) / u_now, NaN when u_now <= 0.
double convergence_ratio(double u_now, double u_prev);

struct SingleBeamResult {
    CVec s;
    CVec p;
    TrainingTrace trace;
};

struct MultiBeamResult {
    BeamformerSet beams;
    TrainingTrace trace;
};

SingleBeamResult run_single_beam(PingPongSim& sim, const TrainingConfig& tcfg, Learners& learners);
MultiBeamResult run_multi_beam(PingPongSim& sim, int n_streams, const TrainingConfig& tcfg,
                               Learners& learners, Rng* reinit_rng = nullptr);

void write_trace_csv(std::ostream& os, const TrainingTrace& trace, int trial, bool header);

}  // namespace stt
