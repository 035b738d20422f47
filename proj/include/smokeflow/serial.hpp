#pragma once

#include <utility>

#include "smokeflow/fracdiff.hpp"
#include "smokeflow/levelset.hpp"
#include "smokeflow/primaldual.hpp"
#include "smokeflow/types.hpp"

// Single-threaded reference implementations of the hot kernels, written as
// plain loops with the same arithmetic as the OpenMP versions. Tests assert
// bit-identical outputs for any thread count; the bench tool compares
// runtimes.
namespace smokeflow::serial {

ScalarField gaussian_smooth(const ScalarField& field, double sigma);

ImageFrame warp(const ImageFrame& frame, const FlowField& flow);

std::pair<ScalarField, double> neighborhood_sum(const ScalarField& field,
                                                const fracdiff::GLWeights& weights);

primaldual::DualField dual_ascent_step(const primaldual::DualField& d,
                                       const GradientTriple& g, const FlowField& z,
                                       double lambda, double theta,
                                       double damping = 1.0);

FlowField update_zhat(const FlowField& z, const primaldual::DualField& d,
                      const GradientTriple& g, double lambda, double theta);

levelset::PhaseFlows update_phase_flows(const levelset::PhaseFlows& p,
                                        const FlowField& zhat,
                                        const fracdiff::GLWeights& w, double theta,
                                        int max_sweeps = 30, double tol = 1e-4);

levelset::LevelSetQuad evolve_levelsets(const levelset::LevelSetQuad& q,
                                        const levelset::PhaseFlows& p,
                                        const FlowField& zhat,
                                        const fracdiff::GLWeights& w,
                                        const levelset::LevelSetParams& sp,
                                        double theta);

FlowField compose_flow(const levelset::PhaseFlows& p,
                       const levelset::LevelSetQuad& q, double eps);

}  // namespace smokeflow::serial
