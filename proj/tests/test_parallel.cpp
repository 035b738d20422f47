// The OpenMP kernels must be bit-identical to the serial reference for any
// thread count: all sweeps are Jacobi-style and reductions fold fixed
// row/block partials.

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "smokeflow/fields.hpp"
#include "smokeflow/serial.hpp"
#include "synthetic.hpp"

using namespace smokeflow;

namespace {

struct ThreadGuard {
    int saved;
    explicit ThreadGuard(int n) {
#ifdef _OPENMP
        saved = omp_get_max_threads();
        omp_set_num_threads(n);
#else
        saved = n;
#endif
    }
    ~ThreadGuard() {
#ifdef _OPENMP
        omp_set_num_threads(saved);
#endif
    }
};

const int kThreadCounts[] = {1, 2, 3};

}  // namespace

TEST_CASE("gaussian_smooth matches the serial reference bitwise") {
    ScalarField f = testutil::random_field(37, 23, 5);
    ScalarField ref = serial::gaussian_smooth(f, 1.7);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        ScalarField got = fields::gaussian_smooth(f, 1.7);
        CHECK(got.data == ref.data);
    }
}

TEST_CASE("warp matches the serial reference bitwise") {
    ImageFrame img = testutil::aniso_texture(33, 8);
    FlowField flow = testutil::random_flow(33, 33, 9, 2.5);
    ImageFrame ref = serial::warp(img, flow);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        CHECK(fields::warp(img, flow).data == ref.data);
    }
}

TEST_CASE("neighborhood_sum matches the serial reference bitwise") {
    auto w = fracdiff::gl_weights(0.45, 3);
    ScalarField f = testutil::random_field(29, 31, 11);
    auto ref = serial::neighborhood_sum(f, w);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto got = fracdiff::neighborhood_sum(f, w);
        CHECK(got.first.data == ref.first.data);
        CHECK(got.second == ref.second);
    }
}

TEST_CASE("dual_ascent_step matches the serial reference bitwise") {
    int n = 27;
    primaldual::DualField d(n, n);
    d.d = testutil::random_field(n, n, 2, -1.0, 1.0);
    GradientTriple g;
    g.ix = testutil::random_field(n, n, 3, -10.0, 10.0);
    g.iy = testutil::random_field(n, n, 4, -10.0, 10.0);
    g.it = testutil::random_field(n, n, 5, -10.0, 10.0);
    FlowField z = testutil::random_flow(n, n, 6, 2.0);

    auto ref = serial::dual_ascent_step(d, g, z, 225.0, 0.001);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto got = primaldual::dual_ascent_step(d, g, z, 225.0, 0.001);
        CHECK(got.d.data == ref.d.data);
    }

    auto zref = serial::update_zhat(z, ref, g, 225.0, 0.001);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto zgot = primaldual::update_zhat(z, ref, g, 225.0, 0.001);
        CHECK(zgot.u.data == zref.u.data);
        CHECK(zgot.v.data == zref.v.data);
    }
}

TEST_CASE("update_phase_flows matches the serial reference bitwise") {
    int n = 18;
    auto w = fracdiff::gl_weights(0.5, 3);
    FlowField zhat = testutil::random_flow(n, n, 21, 2.0);
    levelset::PhaseFlows p(n, n);
    for (int i = 0; i < levelset::PhaseFlows::count; ++i) {
        p.fields()[i].u = testutil::random_field(n, n, 30 + i, -1.0, 1.0);
        p.fields()[i].v = testutil::random_field(n, n, 40 + i, -1.0, 1.0);
    }
    auto ref = serial::update_phase_flows(p, zhat, w, 0.01, 12);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto got = levelset::update_phase_flows(p, zhat, w, 0.01, 12);
        for (int i = 0; i < levelset::PhaseFlows::count; ++i) {
            CHECK(got.fields()[i].u.data == ref.fields()[i].u.data);
            CHECK(got.fields()[i].v.data == ref.fields()[i].v.data);
        }
    }
}

TEST_CASE("evolve_levelsets matches the serial reference bitwise") {
    int n = 20;
    auto w = fracdiff::gl_weights(0.5, 3);
    levelset::LevelSetParams sp;
    levelset::LevelSetQuad q = levelset::init_levelsets(n, n);
    FlowField zhat = testutil::random_flow(n, n, 51, 1.5);
    levelset::PhaseFlows p(n, n);
    for (int i = 0; i < levelset::PhaseFlows::count; ++i) {
        p.fields()[i].u = testutil::random_field(n, n, 60 + i, -1.0, 1.0);
        p.fields()[i].v = testutil::random_field(n, n, 70 + i, -1.0, 1.0);
    }
    auto ref = serial::evolve_levelsets(q, p, zhat, w, sp, 0.001);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto got = levelset::evolve_levelsets(q, p, zhat, w, sp, 0.001);
        CHECK(got.ku1.data == ref.ku1.data);
        CHECK(got.ku2.data == ref.ku2.data);
        CHECK(got.kv1.data == ref.kv1.data);
        CHECK(got.kv2.data == ref.kv2.data);
    }

    auto cref = serial::compose_flow(p, q, sp.eps);
    for (int t : kThreadCounts) {
        ThreadGuard guard(t);
        auto cgot = levelset::compose_flow(p, q, sp.eps);
        CHECK(cgot.u.data == cref.u.data);
        CHECK(cgot.v.data == cref.v.data);
    }
}
