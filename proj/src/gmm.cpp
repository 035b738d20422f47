#include "smokeflow/gmm.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

namespace smokeflow::gmm {

namespace {

constexpr double kVarFloor = 1e-6;
constexpr double kPriorFloor = 1e-6;

double sq(double v) { return v * v; }

double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return sq(a[0] - b[0]) + sq(a[1] - b[1]) + sq(a[2] - b[2]);
}

// Seeded k-means++ center choice: first center uniform, the rest sampled
// proportionally to squared distance from the nearest chosen center.
std::vector<std::array<double, 3>> kmeanspp(
    const std::vector<std::array<double, 3>>& pts, int K, std::mt19937_64& rng) {
    std::vector<std::array<double, 3>> centers;
    std::uniform_int_distribution<size_t> first(0, pts.size() - 1);
    centers.push_back(pts[first(rng)]);

    std::vector<double> d2(pts.size());
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    while (static_cast<int>(centers.size()) < K) {
        double total = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double best = dist2(pts[i], centers[0]);
            for (size_t c = 1; c < centers.size(); ++c)
                best = std::min(best, dist2(pts[i], centers[c]));
            d2[i] = best;
            total += best;
        }
        if (total <= 0.0) {
            // All points coincide with a chosen center; duplicate it.
            centers.push_back(centers.back());
            continue;
        }
        double target = u01(rng) * total;
        double acc = 0.0;
        size_t pick = pts.size() - 1;
        for (size_t i = 0; i < pts.size(); ++i) {
            acc += d2[i];
            if (acc >= target) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick]);
    }
    return centers;
}

double log_gauss_diag(const std::array<double, 3>& x, const std::array<double, 3>& mu,
                      const std::array<double, 3>& var) {
    double acc = -1.5 * std::log(2.0 * M_PI);
    for (int c = 0; c < 3; ++c)
        acc += -0.5 * std::log(var[c]) - 0.5 * sq(x[c] - mu[c]) / var[c];
    return acc;
}

int smoke_component(const GmmModel& model) {
    const std::array<double, 3> white = {1.0, 1.0, 1.0};
    int best = 0;
    double best_d = dist2(model.means[0], white);
    for (int k = 1; k < model.K; ++k) {
        double d = dist2(model.means[k], white);
        if (d > best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

}  // namespace

GmmModel fit_gmm(const std::vector<std::array<double, 3>>& pixels, int K,
                 uint64_t seed, double tol, int max_iter) {
    if (K < 2)
        throw DegenerateMixture("at least two components are required, got K=" +
                                    std::to_string(K),
                                Error::Kind::validation);
    if (K > 64)
        throw InvalidParameter("K must be <= 64");
    if (pixels.size() < static_cast<size_t>(10 * K))
        throw TooFewPixels("need at least " + std::to_string(10 * K) +
                           " pixels for K=" + std::to_string(K) + ", got " +
                           std::to_string(pixels.size()));

    const size_t n = pixels.size();
    std::mt19937_64 rng(seed);

    GmmModel m;
    m.K = K;
    m.means = kmeanspp(pixels, K, rng);
    m.priors.assign(K, 1.0 / K);

    // Start from the per-dimension global variance.
    std::array<double, 3> gmean = {0, 0, 0};
    for (const auto& p : pixels)
        for (int c = 0; c < 3; ++c) gmean[c] += p[c];
    for (int c = 0; c < 3; ++c) gmean[c] /= static_cast<double>(n);
    std::array<double, 3> gvar = {0, 0, 0};
    for (const auto& p : pixels)
        for (int c = 0; c < 3; ++c) gvar[c] += sq(p[c] - gmean[c]);
    for (int c = 0; c < 3; ++c)
        gvar[c] = std::max(gvar[c] / static_cast<double>(n), kVarFloor);
    m.covars.assign(K, gvar);

    std::vector<double> resp(n * K);
    for (int iter = 0; iter < max_iter; ++iter) {
        // E-step with log-sum-exp; per-block partial loglik folded in fixed
        // block order for thread-count independence.
        constexpr size_t block = 1024;
        const size_t nblocks = (n + block - 1) / block;
        std::vector<double> block_ll(nblocks, 0.0);
#pragma omp parallel for schedule(static)
        for (long bi = 0; bi < static_cast<long>(nblocks); ++bi) {
            size_t lo = static_cast<size_t>(bi) * block;
            size_t hi = std::min(lo + block, n);
            double ll = 0.0;
            for (size_t i = lo; i < hi; ++i) {
                double logp[64];
                double mx = -1e300;
                for (int k = 0; k < K; ++k) {
                    logp[k] = std::log(m.priors[k]) +
                              log_gauss_diag(pixels[i], m.means[k], m.covars[k]);
                    mx = std::max(mx, logp[k]);
                }
                double sum = 0.0;
                for (int k = 0; k < K; ++k) sum += std::exp(logp[k] - mx);
                double lse = mx + std::log(sum);
                ll += lse;
                for (int k = 0; k < K; ++k)
                    resp[i * K + k] = std::exp(logp[k] - lse);
            }
            block_ll[static_cast<size_t>(bi)] = ll;
        }
        double loglik = 0.0;
        for (double v : block_ll) loglik += v;
        m.loglik_trace.push_back(loglik);

        // M-step.
        for (int k = 0; k < K; ++k) {
            double nk = 0.0;
            std::array<double, 3> mu = {0, 0, 0};
            for (size_t i = 0; i < n; ++i) {
                double r = resp[i * K + k];
                nk += r;
                for (int c = 0; c < 3; ++c) mu[c] += r * pixels[i][c];
            }
            double prior = nk / static_cast<double>(n);
            if (prior < kPriorFloor)
                throw DegenerateMixture("component " + std::to_string(k) +
                                        " collapsed (prior " + std::to_string(prior) + ")");
            for (int c = 0; c < 3; ++c) mu[c] /= nk;
            std::array<double, 3> var = {0, 0, 0};
            for (size_t i = 0; i < n; ++i) {
                double r = resp[i * K + k];
                for (int c = 0; c < 3; ++c) var[c] += r * sq(pixels[i][c] - mu[c]);
            }
            for (int c = 0; c < 3; ++c)
                var[c] = std::max(var[c] / nk, kVarFloor);
            m.priors[k] = prior;
            m.means[k] = mu;
            m.covars[k] = var;
        }

        if (m.loglik_trace.size() >= 2) {
            double prev = m.loglik_trace[m.loglik_trace.size() - 2];
            if (std::abs(loglik - prev) <= tol * std::abs(loglik)) break;
        }
    }
    return m;
}

Mask classify(const GmmModel& model, const ImageFrame& colormap) {
    if (colormap.channels != 3)
        throw NotColor("classification requires a 3-channel color map");
    if (model.K < 1 || model.means.empty())
        throw InvalidParameter("model is not fitted");

    Mask mask(colormap.width, colormap.height, 0);
    int smoke = smoke_component(model);
    const std::array<double, 3> white = {1.0, 1.0, 1.0};
    if (dist2(model.means[smoke], white) < 1e-12)  // distance < 1e-6
        return mask;

    std::vector<double> logprior(model.K);
    for (int k = 0; k < model.K; ++k) logprior[k] = std::log(model.priors[k]);

#pragma omp parallel for schedule(static)
    for (int y = 0; y < colormap.height; ++y) {
        for (int x = 0; x < colormap.width; ++x) {
            std::array<double, 3> px = {colormap.at(x, y, 0), colormap.at(x, y, 1),
                                        colormap.at(x, y, 2)};
            int best = 0;
            double best_lp = -1e300;
            for (int k = 0; k < model.K; ++k) {
                double lp = logprior[k] + log_gauss_diag(px, model.means[k], model.covars[k]);
                if (lp > best_lp) {
                    best_lp = lp;
                    best = k;
                }
            }
            mask.at(x, y) = best == smoke ? 1 : 0;
        }
    }
    return mask;
}

ImageFrame fuse(const ImageFrame& colormap, const Mask& mask) {
    if (colormap.width != mask.width || colormap.height != mask.height)
        throw SizeMismatch("color map and mask disagree in size");
    ImageFrame out = colormap;
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (!mask.at(x, y))
                for (int c = 0; c < colormap.channels; ++c) out.at(x, y, c) = 0.0f;
    return out;
}

namespace {

Mask dilate(const Mask& m, int radius) {
    Mask out(m.width, m.height, 0);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool hit = false;
            for (int dy = -radius; dy <= radius && !hit; ++dy)
                for (int dx = -radius; dx <= radius && !hit; ++dx) {
                    int xx = x + dx, yy = y + dy;
                    if (xx < 0 || yy < 0 || xx >= m.width || yy >= m.height) continue;
                    if (m.at(xx, yy)) hit = true;
                }
            out.at(x, y) = hit ? 1 : 0;
        }
    return out;
}

Mask erode(const Mask& m, int radius) {
    Mask out(m.width, m.height, 0);
    for (int y = 0; y < m.height; ++y)
        for (int x = 0; x < m.width; ++x) {
            bool all = true;
            for (int dy = -radius; dy <= radius && all; ++dy)
                for (int dx = -radius; dx <= radius && all; ++dx) {
                    int xx = x + dx, yy = y + dy;
                    // Out-of-bounds counts as set so closing stays extensive
                    // at the image border.
                    if (xx < 0 || yy < 0 || xx >= m.width || yy >= m.height) continue;
                    if (!m.at(xx, yy)) all = false;
                }
            out.at(x, y) = all ? 1 : 0;
        }
    return out;
}

}  // namespace

Mask postprocess(const Mask& mask, int min_component_px, int closing_radius) {
    if (min_component_px < 0 || closing_radius < 0)
        throw InvalidParameter("postprocess parameters must be >= 0");
    Mask work = mask;
    if (closing_radius > 0)
        work = erode(dilate(work, closing_radius), closing_radius);
    if (min_component_px <= 1) return work;

    // 8-connected component labeling via BFS; drop small components.
    Mask out(work.width, work.height, 0);
    std::vector<int> label(work.data.size(), -1);
    std::vector<size_t> stack;
    for (int y = 0; y < work.height; ++y) {
        for (int x = 0; x < work.width; ++x) {
            size_t idx = static_cast<size_t>(y) * work.width + x;
            if (!work.data[idx] || label[idx] >= 0) continue;
            stack.clear();
            stack.push_back(idx);
            label[idx] = 1;
            std::vector<size_t> members;
            while (!stack.empty()) {
                size_t cur = stack.back();
                stack.pop_back();
                members.push_back(cur);
                int cx = static_cast<int>(cur % work.width);
                int cy = static_cast<int>(cur / work.width);
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (!dx && !dy) continue;
                        int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= work.width || ny >= work.height)
                            continue;
                        size_t nidx = static_cast<size_t>(ny) * work.width + nx;
                        if (work.data[nidx] && label[nidx] < 0) {
                            label[nidx] = 1;
                            stack.push_back(nidx);
                        }
                    }
            }
            if (members.size() >= static_cast<size_t>(min_component_px))
                for (size_t mi : members) out.data[mi] = 1;
        }
    }
    return out;
}

std::vector<std::array<double, 3>> colormap_pixels(const ImageFrame& colormap) {
    if (colormap.channels != 3)
        throw NotColor("pixel extraction requires a 3-channel frame");
    std::vector<std::array<double, 3>> pts;
    pts.reserve(static_cast<size_t>(colormap.width) * colormap.height);
    for (int y = 0; y < colormap.height; ++y)
        for (int x = 0; x < colormap.width; ++x)
            pts.push_back({colormap.at(x, y, 0), colormap.at(x, y, 1), colormap.at(x, y, 2)});
    return pts;
}

void save_model(const GmmModel& model, const std::string& path) {
    nlohmann::json j;
    j["K"] = model.K;
    j["priors"] = model.priors;
    j["means"] = model.means;
    j["covars"] = model.covars;
    std::ofstream out(path + ".tmp~", std::ios::trunc);
    if (!out) throw IoFailure("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
    out.close();
    if (!out) throw IoFailure("write failed: " + path);
    std::error_code ec;
    std::filesystem::rename(path + ".tmp~", path, ec);
    if (ec) throw IoFailure("rename failed: " + path);
}

GmmModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingFile("no such file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        GmmModel m;
        m.K = j.at("K").get<int>();
        m.priors = j.at("priors").get<std::vector<double>>();
        m.means = j.at("means").get<std::vector<std::array<double, 3>>>();
        m.covars = j.at("covars").get<std::vector<std::array<double, 3>>>();
        if (m.K <= 0 || m.priors.size() != static_cast<size_t>(m.K) ||
            m.means.size() != static_cast<size_t>(m.K) ||
            m.covars.size() != static_cast<size_t>(m.K))
            throw CorruptHeader("inconsistent model record: " + path);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptHeader("malformed model record (" + std::string(e.what()) +
                            "): " + path);
    }
}

}  // namespace smokeflow::gmm
