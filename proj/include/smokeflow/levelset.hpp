#pragma once

#include <utility>

#include "smokeflow/fracdiff.hpp"
#include "smokeflow/types.hpp"

namespace smokeflow::levelset {

using fracdiff::GLWeights;

/// Two level surfaces per flow component. Their signs partition each
/// component's domain into the four phase regions.
struct LevelSetQuad {
    ScalarField ku1, ku2;  // surfaces for the u component
    ScalarField kv1, kv2;  // surfaces for the v component

    LevelSetQuad() = default;
    LevelSetQuad(int w, int h) : ku1(w, h), ku2(w, h), kv1(w, h), kv2(w, h) {}
};

/// The four region-restricted flows Z++, Z+-, Z-+, Z--.
struct PhaseFlows {
    FlowField zpp, zpm, zmp, zmm;

    PhaseFlows() = default;
    PhaseFlows(int w, int h) : zpp(w, h), zpm(w, h), zmp(w, h), zmm(w, h) {}

    FlowField* fields() { return &zpp; }
    const FlowField* fields() const { return &zpp; }
    static constexpr int count = 4;
};

struct LevelSetParams {
    double eps = 1.0;    // Heaviside/Dirac regularization width
    double dtau = 0.1;   // artificial time step
    double h = 1.0;      // grid spacing
    double nu = 1000.0;  // contour weight
    double eta = 1e-6;   // curvature denominator floor

    void validate() const;
};

/// Regularized Heaviside and Dirac:
///   H = 1/2 (1 + (2/pi) arctan(kappa/eps)),  delta = (1/pi) eps/(eps^2+kappa^2)
std::pair<ScalarField, ScalarField> heaviside_dirac(const ScalarField& kappa,
                                                    double eps);

double heaviside_eps(double kappa, double eps);
double dirac_eps(double kappa, double eps);

/// The four curvature coefficients of the semi-implicit mean-curvature
/// discretization: inverse one-sided/central gradient magnitudes toward the
/// E/W/S/N neighbors, denominators floored at eta, replicate borders.
struct CurvatureCoeffs {
    ScalarField c1, c2, c3, c4;  // east, west, south, north
};

CurvatureCoeffs curvature_coeffs(const ScalarField& kappa, double h, double eta);

/// Jacobi fixed-point sweeps of the fractional flow update
///   Z(n+1) = [Zhat + 2 theta sum_q |w_q| Z(n)_neighbors] / R,
///   R = 1 + 2 theta sum|w_q|,
/// applied to every component of every phase flow, stopping when the max
/// change drops below `tol` or after `max_sweeps` sweeps.
PhaseFlows update_phase_flows(const PhaseFlows& p, const FlowField& zhat,
                              const GLWeights& w, double theta,
                              int max_sweeps = 30, double tol = 1e-4);

/// One semi-implicit step per surface of the four-phase competition flow:
///   kappa' = [kappa + gamma (C1 kE + C2 kW + C3 kS + C4 kN)
///             - dtau delta_eps(kappa) F_a] / (1 + gamma (C1+C2+C3+C4)),
/// gamma = (dtau/h^2) nu delta_eps(kappa). The forcing compares phase
/// energies e_ij = (zhat_c - z_ij_c)^2 + rho_ij:
///   F_1 = 1/(2 theta) [(e++ - e-+) H(k2) + (e+- - e--)(1 - H(k2))]
///   F_2 = 1/(2 theta) [(e++ - e+-) H(k1) + (e-+ - e--)(1 - H(k1))]
/// where rho_ij is the GL difference energy density of that phase flow.
LevelSetQuad evolve_levelsets(const LevelSetQuad& q, const PhaseFlows& p,
                              const FlowField& zhat, const GLWeights& w,
                              const LevelSetParams& sp, double theta);

/// Heaviside-weighted recombination, per component:
///   Z = Z++ H1 H2 + Z+- H1 (1-H2) + Z-+ (1-H1) H2 + Z-- (1-H1)(1-H2)
/// The four coefficients form a partition of unity at every pixel.
FlowField compose_flow(const PhaseFlows& p, const LevelSetQuad& q, double eps);

enum class InitScheme { checkerboard, circles };

/// Builds a non-degenerate initial quad (both signs present on every
/// surface). Checkerboard: sin(pi x/5) sin(pi y/5), second surface shifted
/// by 2.5 px. Circles: signed distance to two offset circles of radius
/// min(w,h)/4. Throws DegenerateSize below 8x8.
LevelSetQuad init_levelsets(int width, int height,
                            InitScheme scheme = InitScheme::checkerboard);

}  // namespace smokeflow::levelset
