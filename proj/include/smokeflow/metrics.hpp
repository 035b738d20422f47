#pragma once

#include "smokeflow/types.hpp"

namespace smokeflow::metrics {

struct MetricsReport {
    double aae = 0.0;            // radians
    double aepe = 0.0;           // pixels
    double aeng = 0.0;           // pixels
    double valid_fraction = 0.0;
};

/// Average angular error in the homogeneous (+1) formulation:
///   acos((u ug + v vg + 1) / sqrt((u^2+v^2+1)(ug^2+vg^2+1)))
/// averaged over valid pixels. Ground-truth pixels with magnitude > 1e9
/// (the invalid sentinel) are excluded; `mask`, when given, restricts the
/// average further.
double aae(const FlowField& pred, const FlowField& gt, const Mask* mask = nullptr);

/// Average endpoint error: mean Euclidean distance between flow vectors.
double aepe(const FlowField& pred, const FlowField& gt, const Mask* mask = nullptr);

/// Average error normal to the image gradient: mean |(pred-gt) . n_perp|
/// with n_perp = (-iy, ix)/|grad I|, over pixels with |grad I| >= grad_floor
/// (default 1.0 on the 255 intensity scale).
double aeng(const FlowField& pred, const FlowField& gt, const GradientTriple& g,
            double grad_floor = 1.0);

/// Single-scale SSIM, 11x11 Gaussian window with sigma 1.5, C1 = 0.01^2 and
/// C2 = 0.03^2 on the [0,1] range. Statistics are taken where the full
/// window fits; color inputs are scored per channel and averaged.
double ssim(const ImageFrame& a, const ImageFrame& b);

/// AAE + AEPE + AENG in one record; valid_fraction is the share of pixels
/// entering the AAE/AEPE averages.
MetricsReport evaluate(const FlowField& pred, const FlowField& gt,
                       const GradientTriple& g, const Mask* mask = nullptr,
                       double grad_floor = 1.0);

}  // namespace smokeflow::metrics
