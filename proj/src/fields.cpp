#include "smokeflow/fields.hpp"

#include <cmath>
#include <random>

namespace smokeflow::fields {

namespace {

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

// Separable convolution with replicate borders. Horizontal pass first, then
// vertical; per-pixel accumulation runs over the kernel left to right so the
// serial reference can reproduce it bit-exactly.
ScalarField convolve_separable(const ScalarField& in, const std::vector<double>& k) {
    int radius = static_cast<int>(k.size() / 2);
    ScalarField tmp(in.width, in.height);
    ScalarField out(in.width, in.height);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * in.at_clamped(x + i, y);
            tmp.at(x, y) = acc;
        }
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += k[i + radius] * tmp.at_clamped(x, y + i);
            out.at(x, y) = acc;
        }
    }
    return out;
}

ImageFrame resample_bilinear(const ImageFrame& in, int new_w, int new_h) {
    ImageFrame out(new_w, new_h, in.channels);
    double sx = static_cast<double>(in.width) / new_w;
    double sy = static_cast<double>(in.height) / new_h;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            // Pixel-center mapping, clamped at the borders.
            double fx = (x + 0.5) * sx - 0.5;
            double fy = (y + 0.5) * sy - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            int y0 = static_cast<int>(std::floor(fy));
            double ax = fx - x0;
            double ay = fy - y0;
            auto cl = [&](int xx, int yy, int c) {
                xx = std::clamp(xx, 0, in.width - 1);
                yy = std::clamp(yy, 0, in.height - 1);
                return static_cast<double>(in.at(xx, yy, c));
            };
            for (int c = 0; c < in.channels; ++c) {
                double v = (1 - ay) * ((1 - ax) * cl(x0, y0, c) + ax * cl(x0 + 1, y0, c)) +
                           ay * ((1 - ax) * cl(x0, y0 + 1, c) + ax * cl(x0 + 1, y0 + 1, c));
                out.at(x, y, c) = static_cast<float>(v);
            }
        }
    }
    return out;
}

}  // namespace

void NoiseSpec::validate() const {
    if (sigma < 0.0)
        throw InvalidParameter("noise sigma must be >= 0");
    if (density < 0.0 || density > 1.0)
        throw InvalidParameter("noise density must lie in [0,1]");
}

ScalarField to_luma(const ImageFrame& frame) {
    ScalarField luma(frame.width, frame.height);
    if (frame.channels == 1) {
        for (size_t i = 0; i < frame.data.size(); ++i)
            luma.data[i] = frame.data[i];
        return luma;
    }
#pragma omp parallel for schedule(static)
    for (int y = 0; y < frame.height; ++y)
        for (int x = 0; x < frame.width; ++x)
            luma.at(x, y) = 0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) +
                            0.114 * frame.at(x, y, 2);
    return luma;
}

ScalarField gaussian_smooth(const ScalarField& field, double sigma) {
    if (sigma < 0.0)
        throw InvalidParameter("smoothing sigma must be >= 0");
    if (sigma == 0.0) return field;
    return convolve_separable(field, gaussian_kernel(sigma));
}

ImageFrame gaussian_smooth(const ImageFrame& frame, double sigma) {
    if (sigma < 0.0)
        throw InvalidParameter("smoothing sigma must be >= 0");
    if (sigma == 0.0) return frame;
    auto kernel = gaussian_kernel(sigma);
    ImageFrame out = frame;
    for (int c = 0; c < frame.channels; ++c) {
        ScalarField chan(frame.width, frame.height);
        for (int y = 0; y < frame.height; ++y)
            for (int x = 0; x < frame.width; ++x)
                chan.at(x, y) = frame.at(x, y, c);
        ScalarField sm = convolve_separable(chan, kernel);
        for (int y = 0; y < frame.height; ++y)
            for (int x = 0; x < frame.width; ++x)
                out.at(x, y, c) = static_cast<float>(std::clamp(sm.at(x, y), 0.0, 1.0));
    }
    return out;
}

GradientTriple gradients(const ImageFrame& frame1, const ImageFrame& frame2,
                         double presmooth_sigma) {
    if (frame1.width != frame2.width || frame1.height != frame2.height)
        throw SizeMismatch("gradient frames disagree in size");

    // Luma, 255-scale, presmooth. Derivatives are taken on the 255 scale so
    // the usual data weights (lambda ~ 10^2) operate in a sensible range.
    auto prep = [&](const ImageFrame& f) {
        ScalarField g = to_luma(f);
        for (double& v : g.data) v *= 255.0;
        return gaussian_smooth(g, presmooth_sigma);
    };
    ScalarField a = prep(frame1);
    ScalarField b = prep(frame2);

    GradientTriple g;
    g.ix = ScalarField(a.width, a.height);
    g.iy = ScalarField(a.width, a.height);
    g.it = ScalarField(a.width, a.height);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < a.height; ++y) {
        for (int x = 0; x < a.width; ++x) {
            double ax = 0.5 * (a.at_clamped(x + 1, y) - a.at_clamped(x - 1, y));
            double bx = 0.5 * (b.at_clamped(x + 1, y) - b.at_clamped(x - 1, y));
            double ay = 0.5 * (a.at_clamped(x, y + 1) - a.at_clamped(x, y - 1));
            double by = 0.5 * (b.at_clamped(x, y + 1) - b.at_clamped(x, y - 1));
            g.ix.at(x, y) = 0.5 * (ax + bx);
            g.iy.at(x, y) = 0.5 * (ay + by);
            g.it.at(x, y) = b.at(x, y) - a.at(x, y);
        }
    }
    return g;
}

ImageFrame add_noise(const ImageFrame& frame, const NoiseSpec& spec) {
    spec.validate();
    ImageFrame out = frame;
    std::mt19937_64 rng(spec.seed);

    switch (spec.kind) {
        case NoiseKind::gaussian: {
            if (spec.sigma == 0.0 && spec.mean == 0.0) return out;
            std::normal_distribution<double> dist(spec.mean, spec.sigma);
            for (float& v : out.data)
                v = static_cast<float>(std::clamp(v + dist(rng), 0.0, 1.0));
            break;
        }
        case NoiseKind::salt_pepper: {
            if (spec.density == 0.0) return out;
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            size_t npix = static_cast<size_t>(frame.width) * frame.height;
            for (size_t p = 0; p < npix; ++p) {
                double roll = u01(rng);
                double coin = u01(rng);
                if (roll < spec.density) {
                    float v = coin < 0.5 ? 0.0f : 1.0f;
                    for (int c = 0; c < frame.channels; ++c)
                        out.data[p * frame.channels + c] = v;
                }
            }
            break;
        }
        case NoiseKind::poisson: {
            constexpr double peak = 255.0;
            for (float& v : out.data) {
                std::poisson_distribution<long> dist(static_cast<double>(v) * peak);
                v = static_cast<float>(std::clamp(dist(rng) / peak, 0.0, 1.0));
            }
            break;
        }
    }
    return out;
}

double sample_bilinear(const ScalarField& f, double x, double y) {
    int x0 = static_cast<int>(std::floor(x));
    int y0 = static_cast<int>(std::floor(y));
    double ax = x - x0;
    double ay = y - y0;
    return (1 - ay) * ((1 - ax) * f.at_clamped(x0, y0) + ax * f.at_clamped(x0 + 1, y0)) +
           ay * ((1 - ax) * f.at_clamped(x0, y0 + 1) + ax * f.at_clamped(x0 + 1, y0 + 1));
}

ImageFrame warp(const ImageFrame& frame, const FlowField& flow) {
    if (frame.width != flow.width() || frame.height != flow.height())
        throw SizeMismatch("warp frame and flow disagree in size");
    ImageFrame out(frame.width, frame.height, frame.channels);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < frame.height; ++y) {
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
    }
    return out;
}

std::vector<ImageFrame> build_pyramid(const ImageFrame& frame, int levels,
                                      double factor) {
    if (levels < 1)
        throw InvalidParameter("pyramid levels must be >= 1");
    if (!(factor > 0.0 && factor < 1.0))
        throw InvalidParameter("pyramid factor must lie in (0,1)");

    std::vector<ImageFrame> pyr;
    pyr.push_back(frame);
    for (int l = 1; l < levels; ++l) {
        const ImageFrame& prev = pyr.back();
        int nw = static_cast<int>(std::lround(prev.width * factor));
        int nh = static_cast<int>(std::lround(prev.height * factor));
        if (nw < 8 || nh < 8)
            throw DegenerateSize("pyramid level " + std::to_string(l) +
                                 " would be " + std::to_string(nw) + "x" +
                                 std::to_string(nh));
        ImageFrame sm = gaussian_smooth(prev, 0.8 / factor);
        pyr.push_back(resample_bilinear(sm, nw, nh));
    }
    return pyr;
}

FlowField resize_flow(const FlowField& flow, int new_w, int new_h) {
    FlowField out(new_w, new_h);
    double scale = static_cast<double>(new_w) / flow.width();
    double sx = static_cast<double>(flow.width()) / new_w;
    double sy = static_cast<double>(flow.height()) / new_h;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < new_h; ++y) {
        for (int x = 0; x < new_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            double fy = (y + 0.5) * sy - 0.5;
            out.u.at(x, y) = sample_bilinear(flow.u, fx, fy) * scale;
            out.v.at(x, y) = sample_bilinear(flow.v, fx, fy) * scale;
        }
    }
    return out;
}

}  // namespace smokeflow::fields
