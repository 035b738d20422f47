#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "smokeflow/types.hpp"

namespace smokeflow::gmm {

/// Diagonal-covariance Gaussian mixture over color-space pixels.
struct GmmModel {
    int K = 0;
    std::vector<double> priors;                  // K values, sum 1
    std::vector<std::array<double, 3>> means;    // K points in [0,1]^3
    std::vector<std::array<double, 3>> covars;   // K diagonal variances
    std::vector<double> loglik_trace;            // per-iteration total log-likelihood
};

struct GmmConfig {
    int K = 2;
    uint64_t seed = 0;
    double tol = 1e-6;
    int max_iter = 100;
    // Mask cleanup applied by the pipeline when postprocess is true.
    bool postprocess = false;
    int closing_radius = 1;
    int min_component_px = 8;
};

/// EM fit with seeded k-means++ initialization. Responsibilities are
/// computed through log-sum-exp; variances are floored at 1e-6. Stops when
/// |delta loglik| <= tol * |loglik| or after max_iter iterations.
/// Throws TooFewPixels (fewer than 10*K samples) or DegenerateMixture
/// (K < 2, or a prior collapsing below 1e-6 during EM).
GmmModel fit_gmm(const std::vector<std::array<double, 3>>& pixels, int K,
                 uint64_t seed, double tol = 1e-6, int max_iter = 100);

/// Posterior-argmax labeling of a 3-channel color map. The smoke label goes
/// to the component whose mean lies farthest from white (1,1,1) - zero
/// motion encodes as white, so motion is the off-white mode. Ties break
/// toward the smaller component index; if even the farthest mean is
/// indistinguishable from white (distance < 1e-6) nothing is moving and the
/// mask is empty.
Mask classify(const GmmModel& model, const ImageFrame& colormap);

/// Keeps color-map pixels where the mask is set, black elsewhere.
ImageFrame fuse(const ImageFrame& colormap, const Mask& mask);

/// Morphological closing with a Chebyshev disc (square structuring
/// element) of `closing_radius`, then removal of
/// 8-connected components smaller than min_component_px. Zero parameters
/// leave the mask untouched.
Mask postprocess(const Mask& mask, int min_component_px, int closing_radius);

/// Pixel list of a 3-channel frame, row-major.
std::vector<std::array<double, 3>> colormap_pixels(const ImageFrame& colormap);

/// Structured text (JSON) persistence of a fitted model.
void save_model(const GmmModel& model, const std::string& path);
GmmModel load_model(const std::string& path);

}  // namespace smokeflow::gmm
