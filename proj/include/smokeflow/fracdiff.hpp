#pragma once

#include <utility>
#include <vector>

#include "smokeflow/types.hpp"

namespace smokeflow::fracdiff {

/// Truncated Grünwald-Letnikov coefficient table for fractional order
/// alpha in (0,1): w[0] = 1 and w[q] = (1 - (alpha+1)/q) * w[q-1], which
/// equals (-1)^q * binom(alpha, q). For alpha in (0,1) every w[q], q >= 1,
/// is negative; the update scheme uses the magnitudes |w[q]| so that its
/// per-pixel normalization is a convex combination (see stability_check).
struct GLWeights {
    double alpha = 0.5;
    int window = 3;
    std::vector<double> w;   // w[0..window]
    double tail = 0.0;       // |w[window]|, the truncation residue

    // Sum of |w[q]| over the full cross neighborhood (4 neighbors per ring).
    double neighborhood_sum_abs() const;
};

GLWeights gl_weights(double alpha, int window);

/// Von Neumann certificate for the fractional flow update. With the
/// magnitude convention the normalizer R = 1 + 2*theta*sum|w| makes the
/// scheme an exact convex combination, so the bound holds with equality
/// and |G(k,l)| <= 1 over all wavenumbers.
struct StabilityReport {
    double sum_abs = 0.0;            // sum over neighbors of |w_q|
    double normalizer = 0.0;         // R = 1 + 2*theta*sum_abs
    double bound = 0.0;              // (R - 1) / (2*theta)
    bool stable = false;             // sum_abs <= bound + 1e-12
    double amplification_max = 0.0;  // max |G(k,l)| over the sampled grid
};

StabilityReport stability_check(const GLWeights& weights, double theta,
                                int grid = 32);

/// Weighted neighbor sum over the axis-aligned cross of radius `window`:
/// out(r,s) = sum over q = 1..W, both axes, of |w_q| * field at offset q
/// (replicate borders). Returns the field together with sum|w_q| over the
/// neighborhood; the caller applies theta.
std::pair<ScalarField, double> neighborhood_sum(const ScalarField& field,
                                                const GLWeights& weights);

/// One-sided GL difference energy density used by the level-set forcing and
/// the energy monitor:
///   rho(r,s) = h^(-2 alpha) * [ (sum_q |w_q| (f(r,s) - f(r-q,s)))^2
///                             + (sum_q |w_q| (f(r,s) - f(r,s-q)))^2 ]
/// Vanishes identically on constant fields.
ScalarField gl_energy_density(const ScalarField& field, const GLWeights& weights,
                              double h);

}  // namespace smokeflow::fracdiff
