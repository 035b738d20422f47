#include <doctest.h>

#include <cmath>

#include "smokeflow/fracdiff.hpp"
#include "synthetic.hpp"

using namespace smokeflow;

namespace {

// Independent evaluation of (-1)^q * binom(alpha, q) as a running product,
// without the library's recurrence.
double binomial_weight(double alpha, int q) {
    double prod = 1.0;
    for (int i = 0; i < q; ++i) prod *= (alpha - i) / (i + 1);
    return (q % 2 == 0 ? 1.0 : -1.0) * prod;
}

}  // namespace

TEST_CASE("gl_weights matches the direct binomial evaluation") {
    for (double alpha = 0.1; alpha < 0.95; alpha += 0.1) {
        auto g = fracdiff::gl_weights(alpha, 50);
        for (int q = 0; q <= 50; ++q)
            CHECK(g.w[q] == doctest::Approx(binomial_weight(alpha, q)).epsilon(1e-12));
    }
}

TEST_CASE("gl_weights alpha=0.5 prefix") {
    auto g = fracdiff::gl_weights(0.5, 3);
    CHECK(g.w[0] == doctest::Approx(1.0));
    CHECK(g.w[1] == doctest::Approx(-0.5));
    CHECK(g.w[2] == doctest::Approx(-0.125));
    CHECK(g.w[3] == doctest::Approx(-0.0625));
    CHECK(g.tail == doctest::Approx(0.0625));
}

TEST_CASE("gl_weights near the alpha->1 limit") {
    auto g = fracdiff::gl_weights(1.0 - 1e-10, 2);
    CHECK(g.w[0] == doctest::Approx(1.0));
    CHECK(g.w[1] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(std::abs(g.w[2]) < 1e-9);
}

TEST_CASE("gl_weights signs and partial sums") {
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        auto g = fracdiff::gl_weights(alpha, 60);
        double partial = g.w[0];
        double prev_partial = 2.0;
        for (int q = 1; q <= 60; ++q) {
            CHECK(g.w[q] < 0.0);
            partial += g.w[q];
            // Partial sums stay positive and decrease toward zero.
            CHECK(partial > 0.0);
            CHECK(partial < prev_partial);
            prev_partial = partial;
        }
    }
}

TEST_CASE("gl_weights rejects bad parameters") {
    CHECK_THROWS_AS(fracdiff::gl_weights(0.0, 3), OrderOutOfRange);
    CHECK_THROWS_AS(fracdiff::gl_weights(1.0, 3), OrderOutOfRange);
    CHECK_THROWS_AS(fracdiff::gl_weights(-0.5, 3), OrderOutOfRange);
    CHECK_THROWS_AS(fracdiff::gl_weights(0.5, 0), OrderOutOfRange);
}

TEST_CASE("neighborhood_sum constant field, W=1") {
    auto g = fracdiff::gl_weights(0.5, 1);
    ScalarField f(6, 5, 3.0);
    auto [weighted, coeff] = fracdiff::neighborhood_sum(f, g);
    // Four neighbors each weighted |w_1| = 0.5: 4 * 0.5 * 3 = 6.
    for (double v : weighted.data) CHECK(v == doctest::Approx(6.0));
    CHECK(coeff == doctest::Approx(2.0));
}

TEST_CASE("neighborhood_sum zero field") {
    auto g = fracdiff::gl_weights(0.3, 3);
    ScalarField f(8, 8, 0.0);
    auto [weighted, coeff] = fracdiff::neighborhood_sum(f, g);
    for (double v : weighted.data) CHECK(v == 0.0);
    CHECK(coeff == doctest::Approx(g.neighborhood_sum_abs()));
}

TEST_CASE("neighborhood_sum 1x1 field collapses to self-copies") {
    auto g = fracdiff::gl_weights(0.5, 1);
    ScalarField f(1, 1, 2.5);
    auto [weighted, coeff] = fracdiff::neighborhood_sum(f, g);
    CHECK(weighted.at(0, 0) == doctest::Approx(4.0 * 0.5 * 2.5));
    CHECK(coeff == doctest::Approx(2.0));
}

TEST_CASE("neighborhood_sum against a replicate-border loop oracle") {
    auto g = fracdiff::gl_weights(0.7, 3);
    ScalarField f = testutil::random_field(11, 7, 99);
    auto [weighted, coeff] = fracdiff::neighborhood_sum(f, g);
    for (int y = 0; y < f.height; ++y)
        for (int x = 0; x < f.width; ++x) {
            double expect = 0.0;
            for (int q = 1; q <= 3; ++q) {
                double aw = std::abs(g.w[q]);
                expect += aw * f.at_clamped(x - q, y);
                expect += aw * f.at_clamped(x + q, y);
                expect += aw * f.at_clamped(x, y - q);
                expect += aw * f.at_clamped(x, y + q);
            }
            CHECK(weighted.at(x, y) == doctest::Approx(expect).epsilon(1e-14));
        }
    CHECK(coeff == doctest::Approx(g.neighborhood_sum_abs()));
}

TEST_CASE("stability_check certificate") {
    auto g = fracdiff::gl_weights(0.5, 3);
    auto rep = fracdiff::stability_check(g, 0.001, 32);
    // The bound equals sum|w| by construction of the normalizer.
    CHECK(rep.sum_abs == doctest::Approx(rep.bound));
    CHECK(rep.stable);
    CHECK(rep.normalizer == doctest::Approx(1.0 + 2.0 * 0.001 * rep.sum_abs));
    CHECK(rep.amplification_max <= 1.0 + 1e-12);
}

TEST_CASE("stability_check DC mode has unit gain") {
    // k = l = 0 is on the sampled grid, so the max is exactly 1.
    auto g = fracdiff::gl_weights(0.25, 5);
    auto rep = fracdiff::stability_check(g, 0.01, 16);
    CHECK(rep.amplification_max == doctest::Approx(1.0));
}

TEST_CASE("gl_energy_density vanishes on constants") {
    auto g = fracdiff::gl_weights(0.5, 3);
    ScalarField f(9, 9, 4.2);
    ScalarField rho = fracdiff::gl_energy_density(f, g, 1.0);
    for (double v : rho.data) CHECK(v == 0.0);
}

TEST_CASE("gl_energy_density nonnegative and finite on random fields") {
    auto g = fracdiff::gl_weights(0.4, 2);
    ScalarField f = testutil::random_field(12, 10, 5);
    ScalarField rho = fracdiff::gl_energy_density(f, g, 1.0);
    for (double v : rho.data) {
        CHECK(v >= 0.0);
        CHECK(std::isfinite(v));
    }
}
