#include "smokeflow/primaldual.hpp"

#include <cmath>

namespace smokeflow::primaldual {

namespace {

void require_finite(const ScalarField& f, const char* what) {
    // Row-chunked OR so the scan parallelizes without ordering effects.
    bool bad = false;
#pragma omp parallel for schedule(static) reduction(||: bad)
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x)
            if (!std::isfinite(f.at(x, y))) bad = true;
    }
    if (bad) throw NonFiniteInput(std::string(what) + " contains a non-finite value");
}

}  // namespace

DualField dual_ascent_step(const DualField& d, const GradientTriple& g,
                           const FlowField& z, double lambda, double theta,
                           double damping) {
    if (!d.d.same_size(g.ix) || !d.d.same_size(z.u))
        throw SizeMismatch("dual/gradient/flow sizes disagree");
    require_finite(d.d, "dual field");
    require_finite(g.ix, "ix");
    require_finite(g.iy, "iy");
    require_finite(g.it, "it");
    require_finite(z.u, "u");
    require_finite(z.v, "v");

    DualField out(d.d.width, d.d.height);
    const double l2t = lambda * lambda * theta;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < d.d.height; ++y) {
        for (int x = 0; x < d.d.width; ++x) {
            double ix = g.ix.at(x, y), iy = g.iy.at(x, y);
            double grad2 = ix * ix + iy * iy;
            double residual = g.it.at(x, y) + ix * z.u.at(x, y) + iy * z.v.at(x, y);
            double step = damping / (1.0 + l2t * grad2);
            double dt = d.d.at(x, y) +
                        step * (lambda * residual - l2t * grad2 * d.d.at(x, y));
            out.d.at(x, y) = std::clamp(dt, -1.0, 1.0);
        }
    }
    return out;
}

FlowField update_zhat(const FlowField& z, const DualField& d,
                      const GradientTriple& g, double lambda, double theta) {
    if (!z.u.same_size(d.d) || !z.u.same_size(g.ix))
        throw SizeMismatch("flow/dual/gradient sizes disagree");
    require_finite(z.u, "u");
    require_finite(z.v, "v");
    require_finite(d.d, "dual field");

    FlowField out(z.width(), z.height());
    const double tl = theta * lambda;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < z.height(); ++y) {
        for (int x = 0; x < z.width(); ++x) {
            double dv = d.d.at(x, y);
            out.u.at(x, y) = z.u.at(x, y) - tl * dv * g.ix.at(x, y);
            out.v.at(x, y) = z.v.at(x, y) - tl * dv * g.iy.at(x, y);
        }
    }
    return out;
}

}  // namespace smokeflow::primaldual
