#pragma once

#include <array>
#include <tuple>

#include "smokeflow/types.hpp"

namespace smokeflow::flowviz {

/// 55-entry hue table over six arcs (RY/YG/GC/CB/BM/MR), the classic flow
/// visualization wheel. Oriented so that upward image motion (negative v)
/// maps into the blue-dominant arc and zero motion renders white.
class ColorWheel {
public:
    static constexpr int ncols = 55;

    ColorWheel();

    /// Color for a unit direction/saturation pair: angle a in [-1,1] from
    /// atan2(-v,-u)/pi, rad in [0,1]. Every returned channel lies in [0,1]
    /// and the max channel is always 1 (white at rad = 0).
    std::array<double, 3> color(double a, double rad) const;

    const std::array<double, 3>& entry(int i) const { return table_[i]; }

private:
    std::array<std::array<double, 3>, ncols> table_;
};

/// Magnitude used when `max_mag` is not given: the 99th percentile of flow
/// magnitudes, floored at 1e-3.
double auto_max_mag(const FlowField& flow);

/// Encodes flow as a color map: hue from atan2(-v,-u), saturation
/// min(|z|/max_mag, 1), zero flow white. max_mag <= 0 selects auto scaling.
ImageFrame flow_to_color(const FlowField& flow, double max_mag = 0.0);

/// Approximate inverse of flow_to_color for a known max_mag. Within
/// saturation [0.05, 1] the decoded angle is accurate to well under 3
/// degrees and the magnitude to under 2% of max_mag.
FlowField color_to_flow(const ImageFrame& colormap, double max_mag);

/// Splits a 3-channel frame into three 1-channel frames (lossless).
std::tuple<ImageFrame, ImageFrame, ImageFrame> channel_split(const ImageFrame& colormap);

/// Reassembles what channel_split produced.
ImageFrame channel_merge(const ImageFrame& r, const ImageFrame& g,
                         const ImageFrame& b);

}  // namespace smokeflow::flowviz
