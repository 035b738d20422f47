#include "smokeflow/levelset.hpp"

#include <array>
#include <cmath>

namespace smokeflow::levelset {

void LevelSetParams::validate() const {
    if (!(eps > 0.0)) throw InvalidParameter("level-set eps must be > 0");
    if (!(dtau > 0.0)) throw InvalidParameter("level-set dtau must be > 0");
    if (!(h > 0.0)) throw InvalidParameter("level-set h must be > 0");
    if (!(nu >= 0.0)) throw InvalidParameter("level-set nu must be >= 0");
    if (!(eta > 0.0)) throw InvalidParameter("level-set eta must be > 0");
}

double heaviside_eps(double kappa, double eps) {
    return 0.5 * (1.0 + (2.0 / M_PI) * std::atan(kappa / eps));
}

double dirac_eps(double kappa, double eps) {
    return (1.0 / M_PI) * eps / (eps * eps + kappa * kappa);
}

std::pair<ScalarField, ScalarField> heaviside_dirac(const ScalarField& kappa,
                                                    double eps) {
    if (!(eps > 0.0)) throw InvalidParameter("eps must be > 0");
    ScalarField H(kappa.width, kappa.height);
    ScalarField delta(kappa.width, kappa.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < kappa.height; ++y) {
        for (int x = 0; x < kappa.width; ++x) {
            double k = kappa.at(x, y);
            H.at(x, y) = heaviside_eps(k, eps);
            delta.at(x, y) = dirac_eps(k, eps);
        }
    }
    return {std::move(H), std::move(delta)};
}

CurvatureCoeffs curvature_coeffs(const ScalarField& kappa, double h, double eta) {
    if (!(h > 0.0)) throw InvalidParameter("h must be > 0");
    if (!(eta > 0.0)) throw InvalidParameter("eta must be > 0");

    CurvatureCoeffs c;
    c.c1 = ScalarField(kappa.width, kappa.height);
    c.c2 = ScalarField(kappa.width, kappa.height);
    c.c3 = ScalarField(kappa.width, kappa.height);
    c.c4 = ScalarField(kappa.width, kappa.height);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < kappa.height; ++y) {
        for (int x = 0; x < kappa.width; ++x) {
            auto k = [&](int xx, int yy) { return kappa.at_clamped(xx, yy); };
            double inv2h = 0.5 / h;

            // One-sided difference toward the neighbor, central difference in
            // the transverse direction evaluated at the one-sided midpoint.
            double e_dx = (k(x + 1, y) - k(x, y)) / h;
            double e_dy = (k(x, y + 1) - k(x, y - 1)) * inv2h;
            double w_dx = (k(x, y) - k(x - 1, y)) / h;
            double w_dy = (k(x - 1, y + 1) - k(x - 1, y - 1)) * inv2h;
            double s_dx = (k(x + 1, y) - k(x - 1, y)) * inv2h;
            double s_dy = (k(x, y + 1) - k(x, y)) / h;
            double n_dx = (k(x + 1, y - 1) - k(x - 1, y - 1)) * inv2h;
            double n_dy = (k(x, y) - k(x, y - 1)) / h;

            c.c1.at(x, y) = 1.0 / std::max(eta, std::sqrt(e_dx * e_dx + e_dy * e_dy));
            c.c2.at(x, y) = 1.0 / std::max(eta, std::sqrt(w_dx * w_dx + w_dy * w_dy));
            c.c3.at(x, y) = 1.0 / std::max(eta, std::sqrt(s_dx * s_dx + s_dy * s_dy));
            c.c4.at(x, y) = 1.0 / std::max(eta, std::sqrt(n_dx * n_dx + n_dy * n_dy));
        }
    }
    return c;
}

namespace {

// One Jacobi sweep of the normalized fractional update on a single scalar
// component; returns the max absolute change (exact under any thread count,
// max is order-independent).
double phase_sweep(const ScalarField& zhat, const ScalarField& zprev,
                   ScalarField& znext, const GLWeights& w, double theta) {
    const double R = 1.0 + 2.0 * theta * w.neighborhood_sum_abs();
    std::vector<double> row_max(static_cast<size_t>(zprev.height), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < zprev.height; ++y) {
        double m = 0.0;
        for (int x = 0; x < zprev.width; ++x) {
            double acc = 0.0;
            for (int q = 1; q <= w.window; ++q) {
                double aw = std::abs(w.w[q]);
                acc += aw * (zprev.at_clamped(x - q, y) + zprev.at_clamped(x + q, y) +
                             zprev.at_clamped(x, y - q) + zprev.at_clamped(x, y + q));
            }
            double nv = (zhat.at(x, y) + 2.0 * theta * acc) / R;
            m = std::max(m, std::abs(nv - zprev.at(x, y)));
            znext.at(x, y) = nv;
        }
        row_max[static_cast<size_t>(y)] = m;
    }
    double m = 0.0;
    for (double v : row_max) m = std::max(m, v);
    return m;
}

void solve_component(const ScalarField& zhat, ScalarField& z, const GLWeights& w,
                     double theta, int max_sweeps, double tol) {
    ScalarField next(z.width, z.height);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = phase_sweep(zhat, z, next, w, theta);
        std::swap(z, next);
        if (change < tol) break;
    }
}

}  // namespace

PhaseFlows update_phase_flows(const PhaseFlows& p, const FlowField& zhat,
                              const GLWeights& w, double theta,
                              int max_sweeps, double tol) {
    if (!p.zpp.same_size(zhat))
        throw SizeMismatch("phase flows and zhat disagree in size");
    PhaseFlows out = p;
    for (int i = 0; i < PhaseFlows::count; ++i) {
        solve_component(zhat.u, out.fields()[i].u, w, theta, max_sweeps, tol);
        solve_component(zhat.v, out.fields()[i].v, w, theta, max_sweeps, tol);
    }
    return out;
}

namespace {

// Phase energies e_ij for one flow component: squared data mismatch against
// zhat plus the fractional difference density of the phase flow.
std::array<ScalarField, 4> phase_energies(const FlowField& zhat,
                                          const PhaseFlows& p, bool u_component,
                                          const GLWeights& w, double h) {
    std::array<ScalarField, 4> e;
    const ScalarField& zh = u_component ? zhat.u : zhat.v;
    for (int i = 0; i < 4; ++i) {
        const ScalarField& zc = u_component ? p.fields()[i].u : p.fields()[i].v;
        ScalarField rho = fracdiff::gl_energy_density(zc, w, h);
        e[i] = ScalarField(zh.width, zh.height);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < zh.height; ++y)
            for (int x = 0; x < zh.width; ++x) {
                double diff = zh.at(x, y) - zc.at(x, y);
                e[i].at(x, y) = diff * diff + rho.at(x, y);
            }
    }
    return e;  // order: ++, +-, -+, --
}

// One semi-implicit step of a single surface under forcing F.
ScalarField evolve_surface(const ScalarField& kappa, const ScalarField& forcing,
                           const LevelSetParams& sp) {
    CurvatureCoeffs c = curvature_coeffs(kappa, sp.h, sp.eta);
    ScalarField out(kappa.width, kappa.height);
    const double dt_h2 = sp.dtau / (sp.h * sp.h);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < kappa.height; ++y) {
        for (int x = 0; x < kappa.width; ++x) {
            double kc = kappa.at(x, y);
            double delta = dirac_eps(kc, sp.eps);
            double gamma = dt_h2 * sp.nu * delta;
            double c1 = c.c1.at(x, y), c2 = c.c2.at(x, y);
            double c3 = c.c3.at(x, y), c4 = c.c4.at(x, y);
            double nb = c1 * kappa.at_clamped(x + 1, y) + c2 * kappa.at_clamped(x - 1, y) +
                        c3 * kappa.at_clamped(x, y + 1) + c4 * kappa.at_clamped(x, y - 1);
            // The forcing coefficient is dtau*delta: the nu in gamma and the
            // h^2/nu of the forcing weight cancel, which keeps nu = 0 valid.
            double num = kc + gamma * nb - sp.dtau * delta * forcing.at(x, y);
            out.at(x, y) = num / (1.0 + gamma * (c1 + c2 + c3 + c4));
        }
    }
    return out;
}

}  // namespace

LevelSetQuad evolve_levelsets(const LevelSetQuad& q, const PhaseFlows& p,
                              const FlowField& zhat, const GLWeights& w,
                              const LevelSetParams& sp, double theta) {
    sp.validate();
    if (!q.ku1.same_size(zhat.u))
        throw SizeMismatch("level sets and zhat disagree in size");

    LevelSetQuad out = q;
    const double inv2t = 1.0 / (2.0 * theta);

    struct Component {
        bool is_u;
        const ScalarField* k1;
        const ScalarField* k2;
        ScalarField* o1;
        ScalarField* o2;
    };
    const Component comps[2] = {{true, &q.ku1, &q.ku2, &out.ku1, &out.ku2},
                                {false, &q.kv1, &q.kv2, &out.kv1, &out.kv2}};

    for (const Component& comp : comps) {
        auto e = phase_energies(zhat, p, comp.is_u, w, sp.h);
        const ScalarField& epp = e[0];
        const ScalarField& epm = e[1];
        const ScalarField& emp = e[2];
        const ScalarField& emm = e[3];

        ScalarField f1(epp.width, epp.height);
        ScalarField f2(epp.width, epp.height);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < epp.height; ++y) {
            for (int x = 0; x < epp.width; ++x) {
                double h2 = heaviside_eps(comp.k2->at(x, y), sp.eps);
                double h1 = heaviside_eps(comp.k1->at(x, y), sp.eps);
                f1.at(x, y) = inv2t * ((epp.at(x, y) - emp.at(x, y)) * h2 +
                                       (epm.at(x, y) - emm.at(x, y)) * (1.0 - h2));
                f2.at(x, y) = inv2t * ((epp.at(x, y) - epm.at(x, y)) * h1 +
                                       (emp.at(x, y) - emm.at(x, y)) * (1.0 - h1));
            }
        }
        *comp.o1 = evolve_surface(*comp.k1, f1, sp);
        *comp.o2 = evolve_surface(*comp.k2, f2, sp);
    }
    return out;
}

FlowField compose_flow(const PhaseFlows& p, const LevelSetQuad& q, double eps) {
    if (!p.zpp.u.same_size(q.ku1))
        throw SizeMismatch("phase flows and level sets disagree in size");
    FlowField out(q.ku1.width, q.ku1.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            double hu1 = heaviside_eps(q.ku1.at(x, y), eps);
            double hu2 = heaviside_eps(q.ku2.at(x, y), eps);
            double hv1 = heaviside_eps(q.kv1.at(x, y), eps);
            double hv2 = heaviside_eps(q.kv2.at(x, y), eps);
            out.u.at(x, y) = p.zpp.u.at(x, y) * hu1 * hu2 +
                             p.zpm.u.at(x, y) * hu1 * (1.0 - hu2) +
                             p.zmp.u.at(x, y) * (1.0 - hu1) * hu2 +
                             p.zmm.u.at(x, y) * (1.0 - hu1) * (1.0 - hu2);
            out.v.at(x, y) = p.zpp.v.at(x, y) * hv1 * hv2 +
                             p.zpm.v.at(x, y) * hv1 * (1.0 - hv2) +
                             p.zmp.v.at(x, y) * (1.0 - hv1) * hv2 +
                             p.zmm.v.at(x, y) * (1.0 - hv1) * (1.0 - hv2);
        }
    }
    return out;
}

LevelSetQuad init_levelsets(int width, int height, InitScheme scheme) {
    if (width < 8 || height < 8)
        throw DegenerateSize("level sets need at least 8x8, got " +
                             std::to_string(width) + "x" + std::to_string(height));

    LevelSetQuad q(width, height);
    if (scheme == InitScheme::checkerboard) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double a = std::sin(M_PI * x / 5.0) * std::sin(M_PI * y / 5.0);
                double b = std::sin(M_PI * (x + 2.5) / 5.0) *
                           std::sin(M_PI * (y + 2.5) / 5.0);
                q.ku1.at(x, y) = a;
                q.ku2.at(x, y) = b;
                q.kv1.at(x, y) = a;
                q.kv2.at(x, y) = b;
            }
        }
    } else {
        double radius = std::min(width, height) / 4.0;
        double c1x = width / 3.0, c1y = height / 3.0;
        double c2x = 2.0 * width / 3.0, c2y = 2.0 * height / 3.0;
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                double a = radius - std::hypot(x - c1x, y - c1y);
                double b = radius - std::hypot(x - c2x, y - c2y);
                q.ku1.at(x, y) = a;
                q.ku2.at(x, y) = b;
                q.kv1.at(x, y) = a;
                q.kv2.at(x, y) = b;
            }
        }
    }
    return q;
}

}  // namespace smokeflow::levelset
