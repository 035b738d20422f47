#include "smokeflow/fracdiff.hpp"

#include <cmath>

namespace smokeflow::fracdiff {

double GLWeights::neighborhood_sum_abs() const {
    double s = 0.0;
    for (int q = 1; q <= window; ++q) s += std::abs(w[q]);
    return 4.0 * s;
}

GLWeights gl_weights(double alpha, int window) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw OrderOutOfRange("alpha must lie in (0,1), got " + std::to_string(alpha));
    if (window < 1)
        throw OrderOutOfRange("window must be >= 1, got " + std::to_string(window));

    GLWeights g;
    g.alpha = alpha;
    g.window = window;
    g.w.resize(window + 1);
    g.w[0] = 1.0;
    for (int q = 1; q <= window; ++q)
        g.w[q] = (1.0 - (alpha + 1.0) / q) * g.w[q - 1];
    g.tail = std::abs(g.w[window]);
    return g;
}

StabilityReport stability_check(const GLWeights& weights, double theta, int grid) {
    if (!(theta > 0.0))
        throw InvalidParameter("theta must be > 0");
    if (grid < 1)
        throw InvalidParameter("wavenumber grid must be >= 1");

    StabilityReport rep;
    rep.sum_abs = weights.neighborhood_sum_abs();
    rep.normalizer = 1.0 + 2.0 * theta * rep.sum_abs;
    rep.bound = (rep.normalizer - 1.0) / (2.0 * theta);
    rep.stable = rep.sum_abs <= rep.bound + 1e-12;

    // Amplification factor on the cross stencil. Offsets come in +/- pairs
    // on both axes, so the transfer function is real:
    //   G(k,l) = [1 + 2 theta sum_q |w_q| (2 cos(kq) + 2 cos(lq))] / R
    double max_amp = 0.0;
    for (int i = 0; i < grid; ++i) {
        double k = 2.0 * M_PI * i / grid;
        for (int j = 0; j < grid; ++j) {
            double l = 2.0 * M_PI * j / grid;
            double s = 0.0;
            for (int q = 1; q <= weights.window; ++q)
                s += std::abs(weights.w[q]) * 2.0 * (std::cos(k * q) + std::cos(l * q));
            double g = (1.0 + 2.0 * theta * s) / rep.normalizer;
            max_amp = std::max(max_amp, std::abs(g));
        }
    }
    rep.amplification_max = max_amp;
    return rep;
}

std::pair<ScalarField, double> neighborhood_sum(const ScalarField& field,
                                                const GLWeights& weights) {
    ScalarField out(field.width, field.height);
    const int W = weights.window;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            double acc = 0.0;
            for (int q = 1; q <= W; ++q) {
                double aw = std::abs(weights.w[q]);
                acc += aw * (field.at_clamped(x - q, y) + field.at_clamped(x + q, y) +
                             field.at_clamped(x, y - q) + field.at_clamped(x, y + q));
            }
            out.at(x, y) = acc;
        }
    }
    return {std::move(out), weights.neighborhood_sum_abs()};
}

ScalarField gl_energy_density(const ScalarField& field, const GLWeights& weights,
                              double h) {
    ScalarField out(field.width, field.height);
    const int W = weights.window;
    const double scale = std::pow(h, -2.0 * weights.alpha);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            double c = field.at(x, y);
            double dx = 0.0, dy = 0.0;
            for (int q = 1; q <= W; ++q) {
                double aw = std::abs(weights.w[q]);
                dx += aw * (c - field.at_clamped(x - q, y));
                dy += aw * (c - field.at_clamped(x, y - q));
            }
            out.at(x, y) = scale * (dx * dx + dy * dy);
        }
    }
    return out;
}

}  // namespace smokeflow::fracdiff
