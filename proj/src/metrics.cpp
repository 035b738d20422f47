#include "smokeflow/metrics.hpp"

#include <cmath>
#include <vector>

namespace smokeflow::metrics {

namespace {

constexpr double kSentinel = 1e9;

bool gt_valid(const FlowField& gt, int x, int y) {
    return std::hypot(gt.u.at(x, y), gt.v.at(x, y)) <= kSentinel;
}

void check_sizes(const FlowField& pred, const FlowField& gt, const Mask* mask) {
    if (!pred.same_size(gt))
        throw SizeMismatch("prediction and ground truth disagree in size");
    if (mask && (mask->width != pred.width() || mask->height != pred.height()))
        throw SizeMismatch("mask and flow disagree in size");
}

// Mean of `term` over valid pixels with a fixed row-partial fold, so the
// result is identical for any thread count.
template <typename Term>
std::pair<double, size_t> masked_mean(const FlowField& pred, const FlowField& gt,
                                      const Mask* mask, Term term) {
    int w = pred.width(), h = pred.height();
    std::vector<double> row_sum(static_cast<size_t>(h), 0.0);
    std::vector<size_t> row_n(static_cast<size_t>(h), 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double s = 0.0;
        size_t n = 0;
        for (int x = 0; x < w; ++x) {
            if (mask && !mask->at(x, y)) continue;
            if (!gt_valid(gt, x, y)) continue;
            s += term(x, y);
            ++n;
        }
        row_sum[static_cast<size_t>(y)] = s;
        row_n[static_cast<size_t>(y)] = n;
    }
    double total = 0.0;
    size_t count = 0;
    for (int y = 0; y < h; ++y) {
        total += row_sum[static_cast<size_t>(y)];
        count += row_n[static_cast<size_t>(y)];
    }
    if (count == 0)
        throw EmptyMask("no valid pixels to average over");
    return {total / static_cast<double>(count), count};
}

}  // namespace

double aae(const FlowField& pred, const FlowField& gt, const Mask* mask) {
    check_sizes(pred, gt, mask);
    return masked_mean(pred, gt, mask, [&](int x, int y) {
               double u = pred.u.at(x, y), v = pred.v.at(x, y);
               double ug = gt.u.at(x, y), vg = gt.v.at(x, y);
               double num = u * ug + v * vg + 1.0;
               double den = std::sqrt((u * u + v * v + 1.0) * (ug * ug + vg * vg + 1.0));
               return std::acos(std::clamp(num / den, -1.0, 1.0));
           })
        .first;
}

double aepe(const FlowField& pred, const FlowField& gt, const Mask* mask) {
    check_sizes(pred, gt, mask);
    return masked_mean(pred, gt, mask, [&](int x, int y) {
               double du = pred.u.at(x, y) - gt.u.at(x, y);
               double dv = pred.v.at(x, y) - gt.v.at(x, y);
               return std::sqrt(du * du + dv * dv);
           })
        .first;
}

double aeng(const FlowField& pred, const FlowField& gt, const GradientTriple& g,
            double grad_floor) {
    if (!pred.same_size(gt))
        throw SizeMismatch("prediction and ground truth disagree in size");
    if (g.width() != pred.width() || g.height() != pred.height())
        throw SizeMismatch("gradients and flow disagree in size");

    int w = pred.width(), h = pred.height();
    std::vector<double> row_sum(static_cast<size_t>(h), 0.0);
    std::vector<size_t> row_n(static_cast<size_t>(h), 0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y) {
        double s = 0.0;
        size_t n = 0;
        for (int x = 0; x < w; ++x) {
            double ix = g.ix.at(x, y), iy = g.iy.at(x, y);
            double mag = std::sqrt(ix * ix + iy * iy);
            if (mag < grad_floor) continue;
            double eu = pred.u.at(x, y) - gt.u.at(x, y);
            double ev = pred.v.at(x, y) - gt.v.at(x, y);
            s += std::abs((-iy * eu + ix * ev) / mag);
            ++n;
        }
        row_sum[static_cast<size_t>(y)] = s;
        row_n[static_cast<size_t>(y)] = n;
    }
    double total = 0.0;
    size_t count = 0;
    for (int y = 0; y < h; ++y) {
        total += row_sum[static_cast<size_t>(y)];
        count += row_n[static_cast<size_t>(y)];
    }
    if (count == 0)
        throw NoValidGradients("no pixel reaches the gradient floor");
    return total / static_cast<double>(count);
}

double ssim(const ImageFrame& a, const ImageFrame& b) {
    if (!a.same_size(b))
        throw SizeMismatch("SSIM inputs disagree in size");
    constexpr int win = 11;
    constexpr int radius = win / 2;
    constexpr double sigma = 1.5;
    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    if (a.width < win || a.height < win)
        throw TooSmall("SSIM needs at least 11x11 images");

    // Normalized 11x11 Gaussian window.
    double kernel[win][win];
    double ksum = 0.0;
    for (int j = 0; j < win; ++j)
        for (int i = 0; i < win; ++i) {
            double dx = i - radius, dy = j - radius;
            kernel[j][i] = std::exp(-0.5 * (dx * dx + dy * dy) / (sigma * sigma));
            ksum += kernel[j][i];
        }
    for (int j = 0; j < win; ++j)
        for (int i = 0; i < win; ++i) kernel[j][i] /= ksum;

    int vw = a.width - win + 1;
    int vh = a.height - win + 1;
    double channel_mean_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        std::vector<double> row_sum(static_cast<size_t>(vh), 0.0);
#pragma omp parallel for schedule(static)
        for (int y = 0; y < vh; ++y) {
            double s = 0.0;
            for (int x = 0; x < vw; ++x) {
                double mu1 = 0.0, mu2 = 0.0, m11 = 0.0, m22 = 0.0, m12 = 0.0;
                for (int j = 0; j < win; ++j)
                    for (int i = 0; i < win; ++i) {
                        double kv = kernel[j][i];
                        double p = a.at(x + i, y + j, c);
                        double q = b.at(x + i, y + j, c);
                        mu1 += kv * p;
                        mu2 += kv * q;
                        m11 += kv * p * p;
                        m22 += kv * q * q;
                        m12 += kv * p * q;
                    }
                double s1 = m11 - mu1 * mu1;
                double s2 = m22 - mu2 * mu2;
                double s12 = m12 - mu1 * mu2;
                double num = (2.0 * mu1 * mu2 + c1) * (2.0 * s12 + c2);
                double den = (mu1 * mu1 + mu2 * mu2 + c1) * (s1 + s2 + c2);
                s += num / den;
            }
            row_sum[static_cast<size_t>(y)] = s;
        }
        double total = 0.0;
        for (double v : row_sum) total += v;
        channel_mean_sum += total / (static_cast<double>(vw) * vh);
    }
    return channel_mean_sum / a.channels;
}

MetricsReport evaluate(const FlowField& pred, const FlowField& gt,
                       const GradientTriple& g, const Mask* mask,
                       double grad_floor) {
    MetricsReport rep;
    rep.aae = aae(pred, gt, mask);
    rep.aepe = aepe(pred, gt, mask);
    rep.aeng = aeng(pred, gt, g, grad_floor);

    size_t count = 0;
    for (int y = 0; y < pred.height(); ++y)
        for (int x = 0; x < pred.width(); ++x) {
            if (mask && !mask->at(x, y)) continue;
            if (!gt_valid(gt, x, y)) continue;
            ++count;
        }
    rep.valid_fraction =
        static_cast<double>(count) / (static_cast<double>(pred.width()) * pred.height());
    return rep;
}

}  // namespace smokeflow::metrics
