#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "smokeflow/errors.hpp"

namespace smokeflow {

/// Dense row-major scalar grid in double precision. Used for flow
/// components, level surfaces, dual variables and image derivatives.
struct ScalarField {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    ScalarField() = default;
    ScalarField(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }

    // Replicate-border access.
    double at_clamped(int x, int y) const {
        x = std::clamp(x, 0, width - 1);
        y = std::clamp(y, 0, height - 1);
        return at(x, y);
    }

    size_t size() const { return data.size(); }
    bool same_size(const ScalarField& o) const {
        return width == o.width && height == o.height;
    }
    bool finite() const {
        for (double v : data)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

/// Per-pixel displacement in pixels/frame: u is +x (rightward), v is +y
/// (downward, image coordinates).
struct FlowField {
    ScalarField u;
    ScalarField v;

    FlowField() = default;
    FlowField(int w, int h) : u(w, h), v(w, h) {}

    int width() const { return u.width; }
    int height() const { return u.height; }
    bool same_size(const FlowField& o) const {
        return u.same_size(o.u) && v.same_size(o.v);
    }
    bool finite() const { return u.finite() && v.finite(); }
};

/// Image intensities in [0,1], row-major with interleaved channels
/// (1 = grayscale, 3 = RGB). Single precision by convention.
struct ImageFrame {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<float> data;

    ImageFrame() = default;
    ImageFrame(int w, int h, int c, float fill = 0.0f)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {}

    float& at(int x, int y, int c = 0) {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    float at(int x, int y, int c = 0) const {
        return data[(static_cast<size_t>(y) * width + x) * channels + c];
    }

    bool same_size(const ImageFrame& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    // Checks the type invariants: consistent buffer length, finite values
    // inside [0,1].
    void validate() const;
};

/// Spatial derivatives ix, iy (intensity/pixel on the 255 scale) and the
/// temporal difference it (intensity/frame) of an image pair.
struct GradientTriple {
    ScalarField ix;
    ScalarField iy;
    ScalarField it;

    int width() const { return ix.width; }
    int height() const { return ix.height; }
};

/// Binary per-pixel labels: 0 = background, 1 = smoke.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> data;

    Mask() = default;
    Mask(int w, int h, uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
    uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
    size_t count() const;
};

}  // namespace smokeflow
