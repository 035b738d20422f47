#include "smokeflow/solver.hpp"

#include <cmath>

#include "smokeflow/fields.hpp"
#include "smokeflow/flowviz.hpp"
#include "smokeflow/imgio.hpp"
#include "smokeflow/primaldual.hpp"

namespace smokeflow::solver {

namespace {

using levelset::LevelSetQuad;
using levelset::PhaseFlows;

double max_abs_diff(const FlowField& a, const FlowField& b) {
    std::vector<double> row_max(static_cast<size_t>(a.height()), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < a.height(); ++y) {
        double m = 0.0;
        for (int x = 0; x < a.width(); ++x) {
            m = std::max(m, std::abs(a.u.at(x, y) - b.u.at(x, y)));
            m = std::max(m, std::abs(a.v.at(x, y) - b.v.at(x, y)));
        }
        row_max[static_cast<size_t>(y)] = m;
    }
    double m = 0.0;
    for (double v : row_max) m = std::max(m, v);
    return m;
}

bool all_finite(const FlowField& f) {
    bool ok = true;
#pragma omp parallel for schedule(static) reduction(&&: ok)
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x)
            ok = ok && std::isfinite(f.u.at(x, y)) && std::isfinite(f.v.at(x, y));
    }
    return ok;
}

// Deterministic sum of a per-pixel term: row partials folded in order.
template <typename Term>
double reduce_sum(int width, int height, Term term) {
    std::vector<double> row_sum(static_cast<size_t>(height), 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        double s = 0.0;
        for (int x = 0; x < width; ++x) s += term(x, y);
        row_sum[static_cast<size_t>(y)] = s;
    }
    double total = 0.0;
    for (double v : row_sum) total += v;
    return total;
}

// Single-resolution alternation. `g` already carries any warp compensation;
// state is threaded through so a pyramid caller can continue from an
// upsampled coarse solution.
struct LevelState {
    FlowField z;
    primaldual::DualField d;
    PhaseFlows phases;
    LevelSetQuad quad;
};

void run_level(const GradientTriple& g, const SolverParams& params,
               const fracdiff::GLWeights& w, LevelState& st, bool record,
               FlowResult& result, const DiagnosticsSink& sink) {
    for (int iter = 1; iter <= params.outer_iters; ++iter) {
        for (int k = 0; k < params.dual_iters; ++k)
            st.d = primaldual::dual_ascent_step(st.d, g, st.z, params.lambda,
                                                params.theta, params.dual_damping);
        FlowField zhat =
            primaldual::update_zhat(st.z, st.d, g, params.lambda, params.theta);
        st.phases = levelset::update_phase_flows(st.phases, zhat, w, params.theta,
                                                 params.flow_iters);
        st.quad = levelset::evolve_levelsets(st.quad, st.phases, zhat, w,
                                             params.levelset, params.theta);
        if (params.share_levelset_pairs) {
            // One kappa pair drives both components: the u pair wins.
            st.quad.kv1 = st.quad.ku1;
            st.quad.kv2 = st.quad.ku2;
        }
        FlowField znew = levelset::compose_flow(st.phases, st.quad,
                                                params.levelset.eps);
        double residual = max_abs_diff(znew, st.z);
        st.z = std::move(znew);

        if (!all_finite(st.z))
            throw NonFiniteDivergence("flow became non-finite at iteration " +
                                      std::to_string(iter));
        if (record) {
            EnergyBreakdown e = energy(g, st.z, st.quad, w, params);
            e.iteration = iter;
            result.energy_trace.push_back(e);
            result.residual_trace.push_back(residual);
            if (sink) sink(e, residual);
        }
    }
}

GradientTriple warped_gradients(const ImageFrame& f1, const ImageFrame& f2,
                                const FlowField& base, const SolverParams& params) {
    ImageFrame f2w = fields::warp(f2, base);
    GradientTriple g = fields::gradients(f1, f2w, params.presmooth_sigma);
    // The data residual linearizes around `base`: it + grad.(Z - base), so
    // fold -grad.base into it and keep the residual form it + grad.Z.
#pragma omp parallel for schedule(static)
    for (int y = 0; y < g.it.height; ++y)
        for (int x = 0; x < g.it.width; ++x)
            g.it.at(x, y) -= g.ix.at(x, y) * base.u.at(x, y) +
                             g.iy.at(x, y) * base.v.at(x, y);
    return g;
}

}  // namespace

void SolverParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw InvalidParameter("alpha must lie in (0,1)");
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0");
    if (!(theta > 0.0)) throw InvalidParameter("theta must be > 0");
    if (!(nu >= 0.0)) throw InvalidParameter("nu must be >= 0");
    if (outer_iters < 1) throw InvalidParameter("outer_iters must be >= 1");
    if (dual_iters < 1) throw InvalidParameter("dual_iters must be >= 1");
    if (flow_iters < 1) throw InvalidParameter("flow_iters must be >= 1");
    if (window < 1) throw InvalidParameter("window must be >= 1");
    if (pyramid_levels < 1) throw InvalidParameter("pyramid_levels must be >= 1");
    if (!(pyramid_factor > 0.0 && pyramid_factor < 1.0))
        throw InvalidParameter("pyramid_factor must lie in (0,1)");
    if (presmooth_sigma < 0.0)
        throw InvalidParameter("presmooth_sigma must be >= 0");
    if (!(dual_damping > 0.0)) throw InvalidParameter("dual_damping must be > 0");
    levelset::LevelSetParams lp = levelset;
    lp.nu = nu;  // the solver-level nu feeds the level-set step
    lp.validate();
}

FlowResult estimate_flow(const ImageFrame& frame1, const ImageFrame& frame2,
                         const SolverParams& params, const DiagnosticsSink& sink) {
    params.validate();
    if (frame1.width != frame2.width || frame1.height != frame2.height)
        throw SizeMismatch("frames disagree in size");
    if (frame1.width < 8 || frame1.height < 8)
        throw DegenerateSize("frames must be at least 8x8");

    SolverParams p = params;
    p.levelset.nu = params.nu;

    fracdiff::GLWeights w = fracdiff::gl_weights(p.alpha, p.window);

    FlowResult result;
    result.stability = fracdiff::stability_check(w, p.theta, 32);

    auto pyr1 = fields::build_pyramid(frame1, p.pyramid_levels, p.pyramid_factor);
    auto pyr2 = fields::build_pyramid(frame2, p.pyramid_levels, p.pyramid_factor);

    LevelState st;
    FlowField carried;  // coarse solution propagated to the next finer level
    for (int level = p.pyramid_levels - 1; level >= 0; --level) {
        const ImageFrame& f1 = pyr1[static_cast<size_t>(level)];
        const ImageFrame& f2 = pyr2[static_cast<size_t>(level)];
        bool coarsest = level == p.pyramid_levels - 1;
        bool finest = level == 0;

        st.z = coarsest ? FlowField(f1.width, f1.height)
                        : fields::resize_flow(carried, f1.width, f1.height);
        st.d = primaldual::DualField(f1.width, f1.height);
        st.phases = PhaseFlows(f1.width, f1.height);
        st.quad = levelset::init_levelsets(f1.width, f1.height);

        // Linearize the data residual around the propagated flow. At a
        // single level the base is zero and this is plain gradients of the
        // input pair.
        GradientTriple g = warped_gradients(f1, f2, st.z, p);

        run_level(g, p, w, st, finest, result, sink);
        carried = st.z;
    }

    result.flow = st.z;
    result.levelsets = st.quad;
    return result;
}

EnergyBreakdown energy(const GradientTriple& g, const FlowField& flow,
                       const levelset::LevelSetQuad& q,
                       const fracdiff::GLWeights& w, const SolverParams& params) {
    if (g.width() != flow.width() || g.height() != flow.height())
        throw SizeMismatch("gradients and flow disagree in size");

    EnergyBreakdown e;
    e.data_term = reduce_sum(flow.width(), flow.height(), [&](int x, int y) {
        return params.lambda * std::abs(g.it.at(x, y) +
                                        g.ix.at(x, y) * flow.u.at(x, y) +
                                        g.iy.at(x, y) * flow.v.at(x, y));
    });

    ScalarField rho_u = fracdiff::gl_energy_density(flow.u, w, params.levelset.h);
    ScalarField rho_v = fracdiff::gl_energy_density(flow.v, w, params.levelset.h);
    double frac_sq = reduce_sum(flow.width(), flow.height(), [&](int x, int y) {
        return rho_u.at(x, y) + rho_v.at(x, y);
    });
    e.frac_term = std::sqrt(frac_sq);

    const ScalarField* surfaces[4] = {&q.ku1, &q.ku2, &q.kv1, &q.kv2};
    double contour = 0.0;
    for (const ScalarField* s : surfaces) {
        contour += reduce_sum(s->width, s->height, [&](int x, int y) {
            double gx = 0.5 * (s->at_clamped(x + 1, y) - s->at_clamped(x - 1, y));
            double gy = 0.5 * (s->at_clamped(x, y + 1) - s->at_clamped(x, y - 1));
            return levelset::dirac_eps(s->at(x, y), params.levelset.eps) *
                   std::sqrt(gx * gx + gy * gy);
        });
    }
    e.contour_term = params.nu * contour;
    e.total = e.data_term + e.frac_term + e.contour_term;
    return e;
}

PipelineOutput run_pipeline(const ImageFrame& frame1, const ImageFrame& frame2,
                            const SolverParams& params, const gmm::GmmConfig& cfg,
                            double max_mag, const DiagnosticsSink& sink) {
    PipelineOutput out;
    FlowResult res = estimate_flow(frame1, frame2, params, sink);
    out.flow = imgio::quantize_flow(res.flow);
    out.colormap = imgio::quantize8(flowviz::flow_to_color(out.flow, max_mag));

    auto pixels = gmm::colormap_pixels(out.colormap);
    gmm::GmmModel model =
        gmm::fit_gmm(pixels, cfg.K, cfg.seed, cfg.tol, cfg.max_iter);
    out.mask = gmm::classify(model, out.colormap);
    if (cfg.postprocess)
        out.mask = gmm::postprocess(out.mask, cfg.min_component_px, cfg.closing_radius);
    out.fused = gmm::fuse(out.colormap, out.mask);
    return out;
}

}  // namespace smokeflow::solver
