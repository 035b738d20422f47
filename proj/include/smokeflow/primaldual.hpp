#pragma once

#include "smokeflow/types.hpp"

namespace smokeflow::primaldual {

/// Dual variable of the L1 data term; |d| <= 1 entrywise at all times.
struct DualField {
    ScalarField d;

    DualField() = default;
    DualField(int w, int h) : d(w, h, 0.0) {}
};

/// One projected gradient-ascent step on the data-term dual:
///   step   = damping / (1 + lambda^2 theta |grad I|^2)   per pixel
///   d_temp = d + step * [lambda (I_t + grad I . Z) - lambda^2 theta |grad I|^2 d]
///   d'     = clamp(d_temp, -1, +1)
/// The per-pixel denominator keeps the quadratic term from overshooting;
/// `damping` scales it (default 1).
DualField dual_ascent_step(const DualField& d, const GradientTriple& g,
                           const FlowField& z, double lambda, double theta,
                           double damping = 1.0);

/// Closed-form auxiliary-flow update, the stationarity condition of the
/// data subproblem in Zhat: Zhat = Z - theta * lambda * d * grad I.
FlowField update_zhat(const FlowField& z, const DualField& d,
                      const GradientTriple& g, double lambda, double theta);

}  // namespace smokeflow::primaldual
