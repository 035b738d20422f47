#pragma once

// Synthetic inputs shared by the unit and acceptance suites. Everything is
// seeded and deterministic.

#include <cmath>
#include <random>

#include "smokeflow/fields.hpp"
#include "smokeflow/types.hpp"

namespace testutil {

using namespace smokeflow;

inline ScalarField random_field(int w, int h, uint64_t seed, double lo = -1.0,
                                double hi = 1.0) {
    ScalarField f(w, h);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    for (double& v : f.data) v = u(rng);
    return f;
}

inline FlowField random_flow(int w, int h, uint64_t seed, double scale = 1.0) {
    FlowField f(w, h);
    f.u = random_field(w, h, seed, -scale, scale);
    f.v = random_field(w, h, seed + 1, -scale, scale);
    return f;
}

// Unit-range smoothed white noise.
inline ScalarField smooth_noise(int n, uint64_t seed, double blur) {
    ScalarField f = random_field(n, n, seed, 0.0, 1.0);
    f = fields::gaussian_smooth(f, blur);
    double mn = 1e300, mx = -1e300;
    for (double v : f.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    for (double& v : f.data) v = (v - mn) / (mx - mn);
    return f;
}

// Periodic-in-x texture with x-dominant gradients: a few x-harmonics whose
// phases drift slowly with y. Exactly translation-equivariant under the
// wrapped 1 px shift used by the flow accuracy tests.
inline ImageFrame aniso_texture(int n, uint64_t seed, double ymod = 0.4) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
    const int ks[4] = {2, 3, 5, 7};
    const double amp[4] = {0.10, 0.10, 0.07, 0.05};
    double p[4], q[4];
    int j[4];
    for (int i = 0; i < 4; ++i) {
        p[i] = u(rng);
        q[i] = u(rng);
        j[i] = 1 + static_cast<int>(u(rng)) % 3;
    }
    ImageFrame img(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            double v = 0.5;
            for (int i = 0; i < 4; ++i) {
                double phase = p[i] + ymod * std::sin(2.0 * M_PI * j[i] * y / n + q[i]);
                v += amp[i] * std::sin(2.0 * M_PI * ks[i] * x / n + phase);
            }
            img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    return img;
}

inline ImageFrame shift_right_wrapped(const ImageFrame& in) {
    ImageFrame out = in;
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x)
            for (int c = 0; c < in.channels; ++c)
                out.at(x, y, c) = in.at((x - 1 + in.width) % in.width, y, c);
    return out;
}

// Smoke-like night scene: black sky, two static bright glows, and a
// textured plume drifting upward by `drift` px per frame (the plume's
// internal texture rides with it). `t` is the frame index.
struct SmokeScene {
    int n = 64;
    int drift = 4;
    double plume_base = 0.4;
    double plume_tex = 0.3;
    double glow_amp = 0.9;
    double spread = 0.55;
    ScalarField smoketex;

    explicit SmokeScene(int size = 64, uint64_t tex_seed = 77)
        : n(size), smoketex(smooth_noise(size, tex_seed, 0.8)) {}

    double plume_envelope(double x, double y, int t) const {
        struct Puff {
            double cx, cy, sx, sy, w;
        };
        const Puff puffs[3] = {{0.42, 0.74, 8.0, 11.0, 1.0},
                               {0.34, 0.46, 7.0, 9.0, 0.85},
                               {0.48, 0.26, 6.0, 7.5, 0.6}};
        double env = 0.0;
        for (const Puff& p : puffs) {
            double dx = x - p.cx * n;
            double dy = y - (p.cy * n - drift * t);
            double sx = p.sx * spread, sy = p.sy * spread;
            env += p.w * std::exp(-0.5 * (dx * dx / (sx * sx) + dy * dy / (sy * sy)));
        }
        return std::min(env, 1.0);
    }

    ImageFrame frame(int t) const {
        ImageFrame img(n, n, 1);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                double env = plume_envelope(x, y, t);
                if (env < 0.05) env = 0.0;
                int ty = ((y + drift * t) % n + n) % n;
                double v = env * (plume_base + plume_tex * smoketex.at(x, ty));

                struct Glow {
                    double cx, cy, s, w;
                };
                const Glow glows[2] = {{0.82, 0.24, 7.5, 1.0}, {0.80, 0.74, 6.5, 0.9}};
                double g = 0.0;
                for (const Glow& gl : glows) {
                    double dx = x - gl.cx * n, dy = y - gl.cy * n;
                    g += gl.w * std::exp(-0.5 * (dx * dx + dy * dy) / (gl.s * gl.s));
                }
                if (g > 0.05) v = std::max(v, glow_amp * std::min(g, 1.0));
                img.at(x, y) = static_cast<float>(std::clamp(v, 0.0, 1.0));
            }
        return img;
    }

    // True support of the moving plume in frame 0.
    Mask plume_support(double env_floor = 0.3) const {
        Mask m(n, n, 0);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (plume_envelope(x, y, 0) >= env_floor) m.at(x, y) = 1;
        return m;
    }
};

}  // namespace testutil
