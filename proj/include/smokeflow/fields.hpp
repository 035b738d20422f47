#pragma once

#include <cstdint>
#include <vector>

#include "smokeflow/types.hpp"

namespace smokeflow::fields {

enum class NoiseKind { gaussian, salt_pepper, poisson };

/// Parameters for add_noise. `mean`/`sigma` apply to gaussian noise,
/// `density` to salt-and-pepper; poisson ignores all three and samples
/// Poisson(pixel*255)/255 per channel. Identical seeds give bit-identical
/// output across runs.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double mean = 0.0;
    double sigma = 0.0;
    double density = 0.0;
    uint64_t seed = 0;

    void validate() const;
};

/// Spatiotemporal derivatives of a frame pair. Color inputs are reduced to
/// luma (0.299R + 0.587G + 0.114B) first. Both frames are rescaled to the
/// [0,255] intensity range and Gaussian-smoothed with presmooth_sigma;
/// ix, iy are central differences averaged over the two frames (replicate
/// borders) and it = frame2 - frame1.
GradientTriple gradients(const ImageFrame& frame1, const ImageFrame& frame2,
                         double presmooth_sigma);

/// Gaussian convolution with kernel radius ceil(3*sigma), weights normalized
/// to sum 1, replicate borders. sigma = 0 returns the input unchanged.
ScalarField gaussian_smooth(const ScalarField& field, double sigma);
ImageFrame gaussian_smooth(const ImageFrame& frame, double sigma);

ImageFrame add_noise(const ImageFrame& frame, const NoiseSpec& spec);

/// Bilinear backward warp: out(p) = frame(p + flow(p)), out-of-bounds
/// samples clamp to the border.
ImageFrame warp(const ImageFrame& frame, const FlowField& flow);

/// Level 0 is the input; each further level is smoothed with
/// sigma = 0.8/factor and bilinearly resampled by `factor`.
/// Throws DegenerateSize if any level would fall below 8x8.
std::vector<ImageFrame> build_pyramid(const ImageFrame& frame, int levels,
                                      double factor);

/// Converts to single-channel luma; identity for grayscale input.
ScalarField to_luma(const ImageFrame& frame);

/// Bilinear sample of a scalar field at a real-valued position, clamped.
double sample_bilinear(const ScalarField& f, double x, double y);

/// Resizes a flow field bilinearly and rescales the vectors by the
/// width ratio, for coarse-to-fine propagation.
FlowField resize_flow(const FlowField& flow, int new_w, int new_h);

}  // namespace smokeflow::fields
