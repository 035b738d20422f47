#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "smokeflow/gmm.hpp"
#include "synthetic.hpp"

using namespace smokeflow;

namespace {

std::vector<std::array<double, 3>> two_clusters(size_t n_per, double sigma,
                                                uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<std::array<double, 3>> pts;
    for (size_t i = 0; i < n_per; ++i)
        pts.push_back({0.1 + noise(rng), 0.1 + noise(rng), 0.1 + noise(rng)});
    for (size_t i = 0; i < n_per; ++i)
        pts.push_back({0.9 + noise(rng), 0.9 + noise(rng), 0.9 + noise(rng)});
    return pts;
}

}  // namespace

TEST_CASE("fit_gmm recovers two synthetic clusters") {
    auto pts = two_clusters(2500, 0.05, 7);
    auto model = gmm::fit_gmm(pts, 2, 13);
    REQUIRE(model.K == 2);
    // Match components to the true means up to permutation.
    int lo = model.means[0][0] < model.means[1][0] ? 0 : 1;
    int hi = 1 - lo;
    for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(model.means[static_cast<size_t>(lo)][static_cast<size_t>(c)] - 0.1) <= 0.02);
        CHECK(std::abs(model.means[static_cast<size_t>(hi)][static_cast<size_t>(c)] - 0.9) <= 0.02);
    }
    CHECK(model.priors[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("EM log-likelihood never decreases") {
    std::mt19937_64 meta(99);
    for (int trial = 0; trial < 10; ++trial) {
        auto pts = two_clusters(200, 0.02 + 0.06 * (trial % 5), meta());
        auto model = gmm::fit_gmm(pts, 2 + trial % 3, meta());
        for (size_t i = 1; i < model.loglik_trace.size(); ++i)
            CHECK(model.loglik_trace[i] >= model.loglik_trace[i - 1] - 1e-7);
    }
}

TEST_CASE("priors stay normalized") {
    auto pts = two_clusters(500, 0.08, 3);
    auto model = gmm::fit_gmm(pts, 3, 5);
    double sum = 0.0;
    for (double p : model.priors) {
        CHECK(p >= 1e-6);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    for (auto& cv : model.covars)
        for (double v : cv) CHECK(v >= 1e-6);
}

TEST_CASE("fit_gmm degenerate inputs") {
    std::vector<std::array<double, 3>> pts(100, {0.5, 0.5, 0.5});
    // Identical pixels: either a collapse or variance-floored equal means.
    try {
        auto model = gmm::fit_gmm(pts, 2, 1);
        for (int c = 0; c < 3; ++c) {
            CHECK(model.means[0][static_cast<size_t>(c)] == doctest::Approx(0.5));
            CHECK(model.means[1][static_cast<size_t>(c)] == doctest::Approx(0.5));
            CHECK(model.covars[0][static_cast<size_t>(c)] == doctest::Approx(1e-6));
        }
    } catch (const DegenerateMixture&) {
        // Acceptable alternative outcome.
    }

    CHECK_THROWS_AS(gmm::fit_gmm(pts, 1, 1), DegenerateMixture);
    std::vector<std::array<double, 3>> few(15, {0.5, 0.5, 0.5});
    CHECK_THROWS_AS(gmm::fit_gmm(few, 2, 1), TooFewPixels);
}

TEST_CASE("classify finds a blue blob on white") {
    int n = 48;
    ImageFrame cm(n, n, 3, 1.0f);
    int cx = 20, cy = 24, r = 9;
    size_t blob_px = 0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) {
                cm.at(x, y, 0) = 0.15f;
                cm.at(x, y, 1) = 0.2f;
                cm.at(x, y, 2) = 1.0f;
                ++blob_px;
            }
    auto model = gmm::fit_gmm(gmm::colormap_pixels(cm), 2, 4);
    Mask mask = gmm::classify(model, cm);
    double area = static_cast<double>(mask.count());
    CHECK(area >= 0.95 * static_cast<double>(blob_px));
    CHECK(area <= 1.05 * static_cast<double>(blob_px));
}

TEST_CASE("classify of an all-white colormap is all background") {
    ImageFrame cm(16, 16, 3, 1.0f);
    auto model = gmm::fit_gmm(gmm::colormap_pixels(cm), 2, 9);
    Mask mask = gmm::classify(model, cm);
    CHECK(mask.count() == 0);
}

TEST_CASE("classify picks the mode farther from white") {
    gmm::GmmModel model;
    model.K = 2;
    model.priors = {0.5, 0.5};
    // Distances from white: 0.3 and 0.8.
    model.means = {{1.0 - 0.3, 1.0, 1.0}, {1.0 - 0.8, 1.0, 1.0}};
    model.covars = {{0.001, 0.001, 0.001}, {0.001, 0.001, 0.001}};

    ImageFrame cm(4, 1, 3, 1.0f);
    cm.at(0, 0, 0) = 0.7f;   // near mode 0
    cm.at(1, 0, 0) = 0.2f;   // near mode 1 (smoke)
    cm.at(2, 0, 0) = 0.21f;  // near mode 1
    cm.at(3, 0, 0) = 0.69f;  // near mode 0
    Mask mask = gmm::classify(model, cm);
    CHECK(mask.at(0, 0) == 0);
    CHECK(mask.at(1, 0) == 1);
    CHECK(mask.at(2, 0) == 1);
    CHECK(mask.at(3, 0) == 0);
}

TEST_CASE("classify is invariant under component permutation") {
    auto pts = two_clusters(400, 0.05, 21);
    auto model = gmm::fit_gmm(pts, 2, 8);
    gmm::GmmModel swapped = model;
    std::swap(swapped.priors[0], swapped.priors[1]);
    std::swap(swapped.means[0], swapped.means[1]);
    std::swap(swapped.covars[0], swapped.covars[1]);

    ImageFrame cm(20, 20, 3);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& v : cm.data) v = u(rng);
    Mask a = gmm::classify(model, cm);
    Mask b = gmm::classify(swapped, cm);
    CHECK(a.data == b.data);
}

TEST_CASE("fuse keeps masked pixels and blanks the rest") {
    ImageFrame cm(6, 4, 3);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (float& v : cm.data) v = u(rng);

    Mask ones(6, 4, 1);
    CHECK(gmm::fuse(cm, ones).data == cm.data);

    Mask zeros(6, 4, 0);
    for (float v : gmm::fuse(cm, zeros).data) CHECK(v == 0.0f);

    Mask checker(6, 4, 0);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x) checker.at(x, y) = (x + y) % 2;
    ImageFrame fused = gmm::fuse(cm, checker);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 6; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(fused.at(x, y, c) == (checker.at(x, y) ? cm.at(x, y, c) : 0.0f));

    Mask wrong(5, 4, 1);
    CHECK_THROWS_AS(gmm::fuse(cm, wrong), SizeMismatch);
}

TEST_CASE("postprocess identity case") {
    Mask m(10, 10, 0);
    m.at(3, 3) = 1;
    m.at(7, 2) = 1;
    Mask out = gmm::postprocess(m, 0, 0);
    CHECK(out.data == m.data);
}

TEST_CASE("postprocess removes small islands") {
    Mask m(10, 10, 0);
    m.at(5, 5) = 1;
    Mask out = gmm::postprocess(m, 2, 0);
    CHECK(out.count() == 0);
}

TEST_CASE("postprocess closing merges near blobs") {
    // Two 5-px horizontal runs separated by a single empty column.
    Mask m(16, 9, 0);
    for (int x = 1; x <= 5; ++x) m.at(x, 4) = 1;
    for (int x = 7; x <= 11; ++x) m.at(x, 4) = 1;
    // Without closing, a min-size of 8 removes both 5-px components.
    CHECK(gmm::postprocess(m, 8, 0).count() == 0);
    // Closing with radius 1 bridges the gap into one 11+ px component.
    Mask closed = gmm::postprocess(m, 8, 1);
    CHECK(closed.count() >= 11);
    CHECK(closed.at(6, 4) == 1);
}

TEST_CASE("model persistence round trip") {
    auto pts = two_clusters(300, 0.06, 17);
    auto model = gmm::fit_gmm(pts, 2, 23);
    auto path = (std::filesystem::temp_directory_path() / "smokeflow_gmm_model.json").string();
    gmm::save_model(model, path);
    auto back = gmm::load_model(path);
    CHECK(back.K == model.K);
    CHECK(back.priors == model.priors);
    CHECK(back.means == model.means);
    CHECK(back.covars == model.covars);
    std::filesystem::remove(path);
}
