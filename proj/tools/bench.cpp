// Benchmark comparing the OpenMP kernels against the serial reference
// implementations. Usage: smokeflow_bench [size] [repeats]

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "smokeflow/fields.hpp"
#include "smokeflow/fracdiff.hpp"
#include "smokeflow/levelset.hpp"
#include "smokeflow/primaldual.hpp"
#include "smokeflow/serial.hpp"

namespace sf = smokeflow;

namespace {

double time_ms(int repeats, const std::function<void()>& fn) {
    fn();  // warm-up
    double t0 = omp_get_wtime();
    for (int i = 0; i < repeats; ++i) fn();
    return (omp_get_wtime() - t0) * 1000.0 / repeats;
}

sf::ScalarField random_field(int n, unsigned seed) {
    sf::ScalarField f(n, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : f.data) v = u(rng);
    return f;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 512;
    int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    std::printf("grid %dx%d, %d repeats, %d threads\n", n, n, repeats,
                omp_get_max_threads());

    sf::ScalarField field = random_field(n, 1);
    auto weights = sf::fracdiff::gl_weights(0.5, 3);

    report("gaussian_smooth",
           time_ms(repeats, [&] { sf::serial::gaussian_smooth(field, 2.0); }),
           time_ms(repeats, [&] { sf::fields::gaussian_smooth(field, 2.0); }));

    report("neighborhood_sum",
           time_ms(repeats, [&] { sf::serial::neighborhood_sum(field, weights); }),
           time_ms(repeats, [&] { sf::fracdiff::neighborhood_sum(field, weights); }));

    sf::GradientTriple g;
    g.ix = random_field(n, 2);
    g.iy = random_field(n, 3);
    g.it = random_field(n, 4);
    sf::FlowField z(n, n);
    z.u = random_field(n, 5);
    z.v = random_field(n, 6);
    sf::primaldual::DualField d(n, n);

    report("dual_ascent_step",
           time_ms(repeats, [&] { sf::serial::dual_ascent_step(d, g, z, 225.0, 0.001); }),
           time_ms(repeats, [&] {
               sf::primaldual::dual_ascent_step(d, g, z, 225.0, 0.001);
           }));

    sf::levelset::PhaseFlows phases(n, n);
    report("update_phase_flows",
           time_ms(repeats, [&] {
               sf::serial::update_phase_flows(phases, z, weights, 0.001, 5);
           }),
           time_ms(repeats, [&] {
               sf::levelset::update_phase_flows(phases, z, weights, 0.001, 5);
           }));

    sf::levelset::LevelSetQuad quad = sf::levelset::init_levelsets(n, n);
    sf::levelset::LevelSetParams sp;
    report("evolve_levelsets",
           time_ms(repeats, [&] {
               sf::serial::evolve_levelsets(quad, phases, z, weights, sp, 0.001);
           }),
           time_ms(repeats, [&] {
               sf::levelset::evolve_levelsets(quad, phases, z, weights, sp, 0.001);
           }));

    report("compose_flow",
           time_ms(repeats, [&] { sf::serial::compose_flow(phases, quad, 1.0); }),
           time_ms(repeats, [&] { sf::levelset::compose_flow(phases, quad, 1.0); }));

    sf::ImageFrame frame(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            frame.at(x, y) = static_cast<float>((x ^ y) % 255) / 255.0f;
    report("warp",
           time_ms(repeats, [&] { sf::serial::warp(frame, z); }),
           time_ms(repeats, [&] { sf::fields::warp(frame, z); }));

    return 0;
}
