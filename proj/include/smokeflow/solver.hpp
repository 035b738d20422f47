#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "smokeflow/fracdiff.hpp"
#include "smokeflow/gmm.hpp"
#include "smokeflow/levelset.hpp"
#include "smokeflow/types.hpp"

namespace smokeflow::solver {

/// Every scalar knob of the flow estimator. The reference operating point
/// is alpha=0.5, lambda=225, theta=0.001, nu=1000, 100 outer iterations at
/// native resolution (pyramid_levels=1).
struct SolverParams {
    double alpha = 0.5;        // fractional order, (0,1)
    double lambda = 225.0;     // data weight
    double theta = 0.001;      // coupling
    double nu = 1000.0;        // contour weight
    int outer_iters = 100;
    int dual_iters = 5;
    int flow_iters = 30;       // cap on fixed-point sweeps per outer iteration
    int window = 3;            // GL truncation W
    double dual_damping = 1.0;
    levelset::LevelSetParams levelset;
    int pyramid_levels = 1;
    double pyramid_factor = 0.5;
    double presmooth_sigma = 1.0;
    bool share_levelset_pairs = false;  // one kappa pair drives both components
    uint64_t seed = 0;         // base seed for derived stages (noise, GMM)

    void validate() const;
};

struct EnergyBreakdown {
    double data_term = 0.0;
    double frac_term = 0.0;
    double contour_term = 0.0;
    double total = 0.0;
    int iteration = 0;
};

struct FlowResult {
    FlowField flow;
    levelset::LevelSetQuad levelsets;
    std::vector<EnergyBreakdown> energy_trace;    // one entry per outer iteration
    std::vector<double> residual_trace;           // max-norm flow change per iteration
    fracdiff::StabilityReport stability;
};

/// Optional per-iteration observer; receives the energy record and the
/// max-norm residual of that outer iteration.
using DiagnosticsSink = std::function<void(const EnergyBreakdown&, double residual)>;

/// Runs the full alternation: per outer iteration, dual ascent steps on the
/// data term, the closed-form auxiliary-flow update, fixed-point sweeps of
/// the four phase flows, one level-set evolution step, and the Heaviside
/// recombination of the final flow. Deterministic for fixed params,
/// independent of thread count.
FlowResult estimate_flow(const ImageFrame& frame1, const ImageFrame& frame2,
                         const SolverParams& params,
                         const DiagnosticsSink& sink = nullptr);

/// Energy monitor for the current state: data term sum lambda |it + grad.Z|,
/// fractional term as the root-sum-square of the GL difference stencils of
/// u and v, contour term nu * sum delta_eps(kappa)|grad kappa| over the four
/// surfaces.
EnergyBreakdown energy(const GradientTriple& g, const FlowField& flow,
                       const levelset::LevelSetQuad& q,
                       const fracdiff::GLWeights& w, const SolverParams& params);

struct PipelineOutput {
    FlowField flow;        // float-quantized, as a .flo round trip would give
    ImageFrame colormap;   // 8-bit quantized
    Mask mask;
    ImageFrame fused;
};

/// flow -> color map -> GMM segmentation -> mask fusion. Intermediate
/// artifacts pass through their file quantizations (float32 flow, 8-bit
/// color map), so running the stages through files yields byte-identical
/// results.
/// `max_mag` feeds the color coding; 0 selects the auto scale.
PipelineOutput run_pipeline(const ImageFrame& frame1, const ImageFrame& frame2,
                            const SolverParams& params, const gmm::GmmConfig& cfg,
                            double max_mag = 0.0,
                            const DiagnosticsSink& sink = nullptr);

}  // namespace smokeflow::solver
