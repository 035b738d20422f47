#include "smokeflow/serial.hpp"

#include <array>
#include <cmath>

namespace smokeflow::serial {

namespace {

using fracdiff::GLWeights;
using levelset::LevelSetParams;
using levelset::LevelSetQuad;
using levelset::PhaseFlows;

std::vector<double> gaussian_kernel(double sigma) {
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

}  // namespace

ScalarField gaussian_smooth(const ScalarField& field, double sigma) {
    if (sigma < 0.0)
        throw InvalidParameter("smoothing sigma must be >= 0");
    if (sigma == 0.0) return field;
    auto k = gaussian_kernel(sigma);
    int radius = static_cast<int>(k.size() / 2);
    ScalarField tmp(field.width, field.height);
    ScalarField out(field.width, field.height);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * field.at_clamped(x + i, y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at_clamped(x, y + i);
            out.at(x, y) = acc;
        }
    return out;
}

ImageFrame warp(const ImageFrame& frame, const FlowField& flow) {
    if (frame.width != flow.width() || frame.height != flow.height())
        throw SizeMismatch("warp frame and flow disagree in size");
    ImageFrame out(frame.width, frame.height, frame.channels);
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x) {
            double sx = x + flow.u.at(x, y);
            double sy = y + flow.v.at(x, y);
            int x0 = static_cast<int>(std::floor(sx));
            int y0 = static_cast<int>(std::floor(sy));
            double ax = sx - x0;
            double ay = sy - y0;
            auto cl = [&](int xx, int yy, int c) {
                xx = std::clamp(xx, 0, frame.width - 1);
                yy = std::clamp(yy, 0, frame.height - 1);
                return static_cast<double>(frame.at(xx, yy, c));
            };
            for (int c = 0; c < frame.channels; ++c) {
                double v = (1 - ay) * ((1 - ax) * cl(x0, y0, c) + ax * cl(x0 + 1, y0, c)) +
                           ay * ((1 - ax) * cl(x0, y0 + 1, c) + ax * cl(x0 + 1, y0 + 1, c));
                out.at(x, y, c) = static_cast<float>(v);
            }
        }
    return out;
}

std::pair<ScalarField, double> neighborhood_sum(const ScalarField& field,
                                                const GLWeights& weights) {
    ScalarField out(field.width, field.height);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            double acc = 0.0;
            for (int q = 1; q <= weights.window; ++q) {
                double aw = std::abs(weights.w[q]);
                acc += aw * (field.at_clamped(x - q, y) + field.at_clamped(x + q, y) +
                             field.at_clamped(x, y - q) + field.at_clamped(x, y + q));
            }
            out.at(x, y) = acc;
        }
    return {std::move(out), weights.neighborhood_sum_abs()};
}

primaldual::DualField dual_ascent_step(const primaldual::DualField& d,
                                       const GradientTriple& g, const FlowField& z,
                                       double lambda, double theta, double damping) {
    primaldual::DualField out(d.d.width, d.d.height);
    const double l2t = lambda * lambda * theta;
    for (int y = 0; y < d.d.height; ++y)
        for (int x = 0; x < d.d.width; ++x) {
            double ix = g.ix.at(x, y), iy = g.iy.at(x, y);
            double grad2 = ix * ix + iy * iy;
            double residual = g.it.at(x, y) + ix * z.u.at(x, y) + iy * z.v.at(x, y);
            double step = damping / (1.0 + l2t * grad2);
            double dt = d.d.at(x, y) +
                        step * (lambda * residual - l2t * grad2 * d.d.at(x, y));
            out.d.at(x, y) = std::clamp(dt, -1.0, 1.0);
        }
    return out;
}

FlowField update_zhat(const FlowField& z, const primaldual::DualField& d,
                      const GradientTriple& g, double lambda, double theta) {
    FlowField out(z.width(), z.height());
    const double tl = theta * lambda;
    for (int y = 0; y < z.height(); ++y)
        for (int x = 0; x < z.width(); ++x) {
            double dv = d.d.at(x, y);
            out.u.at(x, y) = z.u.at(x, y) - tl * dv * g.ix.at(x, y);
            out.v.at(x, y) = z.v.at(x, y) - tl * dv * g.iy.at(x, y);
        }
    return out;
}

namespace {

double phase_sweep(const ScalarField& zhat, const ScalarField& zprev,
                   ScalarField& znext, const GLWeights& w, double theta) {
    const double R = 1.0 + 2.0 * theta * w.neighborhood_sum_abs();
    std::vector<double> row_max(static_cast<size_t>(zprev.height), 0.0);
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

ScalarField gl_density(const ScalarField& field, const GLWeights& weights,
                              double h) {
    ScalarField out(field.width, field.height);
    const double scale = std::pow(h, -2.0 * weights.alpha);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            double c = field.at(x, y);
            double dx = 0.0, dy = 0.0;
            for (int q = 1; q <= weights.window; ++q) {
                double aw = std::abs(weights.w[q]);
                dx += aw * (c - field.at_clamped(x - q, y));
                dy += aw * (c - field.at_clamped(x, y - q));
            }
            out.at(x, y) = scale * (dx * dx + dy * dy);
        }
    return out;
}

std::array<ScalarField, 4> phase_energies(const FlowField& zhat, const PhaseFlows& p,
                                          bool u_component, const GLWeights& w,
                                          double h) {
    std::array<ScalarField, 4> e;
    const ScalarField& zh = u_component ? zhat.u : zhat.v;
    for (int i = 0; i < 4; ++i) {
        const ScalarField& zc = u_component ? p.fields()[i].u : p.fields()[i].v;
        ScalarField rho = gl_density(zc, w, h);
        e[i] = ScalarField(zh.width, zh.height);
        for (int y = 0; y < zh.height; ++y)
            for (int x = 0; x < zh.width; ++x) {
                double diff = zh.at(x, y) - zc.at(x, y);
                e[i].at(x, y) = diff * diff + rho.at(x, y);
            }
    }
    return e;
}

ScalarField evolve_surface(const ScalarField& kappa, const ScalarField& forcing,
                           const LevelSetParams& sp) {
    ScalarField out(kappa.width, kappa.height);
    const double dt_h2 = sp.dtau / (sp.h * sp.h);
    const double inv2h = 0.5 / sp.h;
    for (int y = 0; y < kappa.height; ++y)
        for (int x = 0; x < kappa.width; ++x) {
            auto k = [&](int xx, int yy) { return kappa.at_clamped(xx, yy); };
            double e_dx = (k(x + 1, y) - k(x, y)) / sp.h;
            double e_dy = (k(x, y + 1) - k(x, y - 1)) * inv2h;
            double w_dx = (k(x, y) - k(x - 1, y)) / sp.h;
            double w_dy = (k(x - 1, y + 1) - k(x - 1, y - 1)) * inv2h;
            double s_dx = (k(x + 1, y) - k(x - 1, y)) * inv2h;
            double s_dy = (k(x, y + 1) - k(x, y)) / sp.h;
            double n_dx = (k(x + 1, y - 1) - k(x - 1, y - 1)) * inv2h;
            double n_dy = (k(x, y) - k(x, y - 1)) / sp.h;
            double c1 = 1.0 / std::max(sp.eta, std::sqrt(e_dx * e_dx + e_dy * e_dy));
            double c2 = 1.0 / std::max(sp.eta, std::sqrt(w_dx * w_dx + w_dy * w_dy));
            double c3 = 1.0 / std::max(sp.eta, std::sqrt(s_dx * s_dx + s_dy * s_dy));
            double c4 = 1.0 / std::max(sp.eta, std::sqrt(n_dx * n_dx + n_dy * n_dy));

            double kc = kappa.at(x, y);
            double delta = levelset::dirac_eps(kc, sp.eps);
            double gamma = dt_h2 * sp.nu * delta;
            double nb = c1 * k(x + 1, y) + c2 * k(x - 1, y) + c3 * k(x, y + 1) +
                        c4 * k(x, y - 1);
            double num = kc + gamma * nb - sp.dtau * delta * forcing.at(x, y);
            out.at(x, y) = num / (1.0 + gamma * (c1 + c2 + c3 + c4));
        }
    return out;
}

}  // namespace

PhaseFlows update_phase_flows(const PhaseFlows& p, const FlowField& zhat,
                              const GLWeights& w, double theta, int max_sweeps,
                              double tol) {
    PhaseFlows out = p;
    for (int i = 0; i < PhaseFlows::count; ++i) {
        solve_component(zhat.u, out.fields()[i].u, w, theta, max_sweeps, tol);
        solve_component(zhat.v, out.fields()[i].v, w, theta, max_sweeps, tol);
    }
    return out;
}

LevelSetQuad evolve_levelsets(const LevelSetQuad& q, const PhaseFlows& p,
                              const FlowField& zhat, const GLWeights& w,
                              const LevelSetParams& sp, double theta) {
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
        ScalarField f1(e[0].width, e[0].height);
        ScalarField f2(e[0].width, e[0].height);
        for (int y = 0; y < f1.height; ++y)
            for (int x = 0; x < f1.width; ++x) {
                double h2 = levelset::heaviside_eps(comp.k2->at(x, y), sp.eps);
                double h1 = levelset::heaviside_eps(comp.k1->at(x, y), sp.eps);
                f1.at(x, y) = inv2t * ((e[0].at(x, y) - e[2].at(x, y)) * h2 +
                                       (e[1].at(x, y) - e[3].at(x, y)) * (1.0 - h2));
                f2.at(x, y) = inv2t * ((e[0].at(x, y) - e[1].at(x, y)) * h1 +
                                       (e[2].at(x, y) - e[3].at(x, y)) * (1.0 - h1));
            }
        *comp.o1 = evolve_surface(*comp.k1, f1, sp);
        *comp.o2 = evolve_surface(*comp.k2, f2, sp);
    }
    return out;
}

FlowField compose_flow(const PhaseFlows& p, const LevelSetQuad& q, double eps) {
    FlowField out(q.ku1.width, q.ku1.height);
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) {
            double hu1 = levelset::heaviside_eps(q.ku1.at(x, y), eps);
            double hu2 = levelset::heaviside_eps(q.ku2.at(x, y), eps);
            double hv1 = levelset::heaviside_eps(q.kv1.at(x, y), eps);
            double hv2 = levelset::heaviside_eps(q.kv2.at(x, y), eps);
            out.u.at(x, y) = p.zpp.u.at(x, y) * hu1 * hu2 +
                             p.zpm.u.at(x, y) * hu1 * (1.0 - hu2) +
                             p.zmp.u.at(x, y) * (1.0 - hu1) * hu2 +
                             p.zmm.u.at(x, y) * (1.0 - hu1) * (1.0 - hu2);
            out.v.at(x, y) = p.zpp.v.at(x, y) * hv1 * hv2 +
                             p.zpm.v.at(x, y) * hv1 * (1.0 - hv2) +
                             p.zmp.v.at(x, y) * (1.0 - hv1) * hv2 +
                             p.zmm.v.at(x, y) * (1.0 - hv1) * (1.0 - hv2);
        }
    return out;
}

}  // namespace smokeflow::serial
