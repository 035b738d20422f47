#include "smokeflow/flowviz.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace smokeflow::flowviz {

ColorWheel::ColorWheel() {
    constexpr int RY = 15, YG = 6, GC = 4, CB = 11, BM = 13, MR = 6;
    int k = 0;
    for (int i = 0; i < RY; ++i) table_[k++] = {1.0, i / double(RY), 0.0};
    for (int i = 0; i < YG; ++i) table_[k++] = {1.0 - i / double(YG), 1.0, 0.0};
    for (int i = 0; i < GC; ++i) table_[k++] = {0.0, 1.0, i / double(GC)};
    for (int i = 0; i < CB; ++i) table_[k++] = {0.0, 1.0 - i / double(CB), 1.0};
    for (int i = 0; i < BM; ++i) table_[k++] = {i / double(BM), 0.0, 1.0};
    for (int i = 0; i < MR; ++i) table_[k++] = {1.0, 0.0, 1.0 - i / double(MR)};
}

std::array<double, 3> ColorWheel::color(double a, double rad) const {
    double fk = (a + 1.0) / 2.0 * (ncols - 1);
    int k0 = static_cast<int>(std::floor(fk));
    if (k0 < 0) k0 = 0;
    if (k0 >= ncols) k0 = ncols - 1;
    int k1 = (k0 + 1) % ncols;
    double f = fk - k0;
    std::array<double, 3> out{};
    for (int c = 0; c < 3; ++c) {
        double col = (1.0 - f) * table_[k0][c] + f * table_[k1][c];
        out[c] = 1.0 - rad * (1.0 - col);
    }
    return out;
}

namespace {

const ColorWheel& wheel() {
    static const ColorWheel w;
    return w;
}

}  // namespace

double auto_max_mag(const FlowField& flow) {
    std::vector<double> mags(flow.u.size());
    for (size_t i = 0; i < mags.size(); ++i)
        mags[i] = std::hypot(flow.u.data[i], flow.v.data[i]);
    size_t idx = static_cast<size_t>(std::floor(0.99 * (mags.size() - 1)));
    std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
    return std::max(mags[idx], 1e-3);
}

ImageFrame flow_to_color(const FlowField& flow, double max_mag) {
    if (!flow.finite())
        throw NonFiniteInput("flow contains a non-finite value");
    double scale = max_mag > 0.0 ? max_mag : auto_max_mag(flow);

    ImageFrame out(flow.width(), flow.height(), 3);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            double u = flow.u.at(x, y);
            double v = flow.v.at(x, y);
            double rad = std::min(std::sqrt(u * u + v * v) / scale, 1.0);
            double a = std::atan2(-v, -u) / M_PI;
            auto col = wheel().color(a, rad);
            out.at(x, y, 0) = static_cast<float>(col[0]);
            out.at(x, y, 1) = static_cast<float>(col[1]);
            out.at(x, y, 2) = static_cast<float>(col[2]);
        }
    }
    return out;
}

namespace {

// Distance from white along the wheel: 1 - color(a, 1). Each entry has a
// zero channel and a unit channel, so |v(a)| is always >= 1 somewhere and
// the direction identifies the angle.
std::array<double, 3> wheel_vec(double a) {
    auto col = wheel().color(a, 1.0);
    return {1.0 - col[0], 1.0 - col[1], 1.0 - col[2]};
}

double cosine_score(const std::array<double, 3>& p, const std::array<double, 3>& q) {
    double dot = 0.0, np = 0.0, nq = 0.0;
    for (int c = 0; c < 3; ++c) {
        dot += p[c] * q[c];
        np += p[c] * p[c];
        nq += q[c] * q[c];
    }
    return dot / std::sqrt(np * nq);
}

}  // namespace

FlowField color_to_flow(const ImageFrame& colormap, double max_mag) {
    if (colormap.channels != 3)
        throw NotColor("color map must have 3 channels");
    if (!(max_mag > 0.0))
        throw InvalidParameter("max_mag must be > 0");

    FlowField out(colormap.width, colormap.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < colormap.height; ++y) {
        for (int x = 0; x < colormap.width; ++x) {
            std::array<double, 3> p = {1.0 - colormap.at(x, y, 0),
                                       1.0 - colormap.at(x, y, 1),
                                       1.0 - colormap.at(x, y, 2)};
            double pn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            if (pn < 1e-9) {
                out.u.at(x, y) = 0.0;
                out.v.at(x, y) = 0.0;
                continue;
            }
            // Coarse angular scan, then a fine pass around the best bin.
            constexpr int coarse = 720;
            double best_a = -1.0, best_s = -2.0;
            for (int i = 0; i < coarse; ++i) {
                double a = -1.0 + 2.0 * i / coarse;
                double s = cosine_score(p, wheel_vec(a));
                if (s > best_s) {
                    best_s = s;
                    best_a = a;
                }
            }
            double lo = best_a - 2.0 / coarse, hi = best_a + 2.0 / coarse;
            constexpr int fine = 200;
            for (int i = 0; i <= fine; ++i) {
                double a = lo + (hi - lo) * i / fine;
                double wrapped = a;
                if (wrapped < -1.0) wrapped += 2.0;
                if (wrapped > 1.0) wrapped -= 2.0;
                double s = cosine_score(p, wheel_vec(wrapped));
                if (s > best_s) {
                    best_s = s;
                    best_a = wrapped;
                }
            }
            auto v = wheel_vec(best_a);
            double vn = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            double rad = pn / vn;
            double phi = best_a * M_PI;
            out.u.at(x, y) = -rad * max_mag * std::cos(phi);
            out.v.at(x, y) = -rad * max_mag * std::sin(phi);
        }
    }
    return out;
}

std::tuple<ImageFrame, ImageFrame, ImageFrame> channel_split(const ImageFrame& colormap) {
    if (colormap.channels != 3)
        throw NotColor("channel_split requires a 3-channel frame");
    ImageFrame r(colormap.width, colormap.height, 1);
    ImageFrame g(colormap.width, colormap.height, 1);
    ImageFrame b(colormap.width, colormap.height, 1);
    for (int y = 0; y < colormap.height; ++y)
        for (int x = 0; x < colormap.width; ++x) {
            r.at(x, y) = colormap.at(x, y, 0);
            g.at(x, y) = colormap.at(x, y, 1);
            b.at(x, y) = colormap.at(x, y, 2);
        }
    return {std::move(r), std::move(g), std::move(b)};
}

ImageFrame channel_merge(const ImageFrame& r, const ImageFrame& g,
                         const ImageFrame& b) {
    if (!r.same_size(g) || !r.same_size(b) || r.channels != 1)
        throw SizeMismatch("channel_merge requires three matching 1-channel frames");
    ImageFrame out(r.width, r.height, 3);
    for (int y = 0; y < r.height; ++y)
        for (int x = 0; x < r.width; ++x) {
            out.at(x, y, 0) = r.at(x, y);
            out.at(x, y, 1) = g.at(x, y);
            out.at(x, y, 2) = b.at(x, y);
        }
    return out;
}

}  // namespace smokeflow::flowviz
