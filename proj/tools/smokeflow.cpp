// Command-line front end: flow estimation, color coding, GMM segmentation,
// evaluation and the full pipeline, driven by flags and/or a flat key=value
// config file (later sources win: defaults < config < flags).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "smokeflow/fields.hpp"
#include "smokeflow/flowviz.hpp"
#include "smokeflow/gmm.hpp"
#include "smokeflow/imgio.hpp"
#include "smokeflow/metrics.hpp"
#include "smokeflow/solver.hpp"

namespace sf = smokeflow;

namespace {

struct RunConfig {
    sf::solver::SolverParams solver;
    sf::gmm::GmmConfig gmm;
    sf::fields::NoiseSpec noise;
    double max_mag = 0.0;  // 0 = auto (99th percentile)
};

int log_level() {
    const char* env = std::getenv("SMOKEFLOW_LOG");
    if (!env) return 1;
    std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[smokeflow] " << msg << "\n";
}

sf::solver::DiagnosticsSink make_sink(const std::string& path,
                                      std::ofstream& file_holder) {
    if (path.empty()) return nullptr;
    std::ostream* os = nullptr;
    if (path == "-") {
        os = &std::cout;
    } else {
        file_holder.open(path, std::ios::trunc);
        if (!file_holder) throw sf::IoFailure("cannot open diagnostics sink: " + path);
        os = &file_holder;
    }
    return [os](const sf::solver::EnergyBreakdown& e, double residual) {
        nlohmann::json j{{"iteration", e.iteration},
                         {"data", e.data_term},
                         {"frac", e.frac_term},
                         {"contour", e.contour_term},
                         {"total", e.total},
                         {"residual", residual}};
        (*os) << j.dump() << "\n";
    };
}

nlohmann::json metrics_json(const sf::metrics::MetricsReport& rep) {
    return nlohmann::json{{"aae", rep.aae},
                          {"aepe", rep.aepe},
                          {"aeng", rep.aeng},
                          {"valid_fraction", rep.valid_fraction}};
}

void add_solver_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--alpha", cfg.solver.alpha, "Fractional order in (0,1)")
        ->capture_default_str();
    app.add_option("--lambda", cfg.solver.lambda, "Data fidelity weight")
        ->capture_default_str();
    app.add_option("--theta", cfg.solver.theta, "Coupling parameter")
        ->capture_default_str();
    app.add_option("--nu", cfg.solver.nu, "Contour weight")->capture_default_str();
    app.add_option("--iters", cfg.solver.outer_iters, "Outer iterations")
        ->capture_default_str();
    app.add_option("--dual-iters", cfg.solver.dual_iters,
                   "Dual ascent steps per outer iteration")
        ->capture_default_str();
    app.add_option("--flow-iters", cfg.solver.flow_iters,
                   "Fixed-point sweep cap per outer iteration")
        ->capture_default_str();
    app.add_option("--window", cfg.solver.window, "GL truncation window")
        ->capture_default_str();
    app.add_option("--eps", cfg.solver.levelset.eps,
                   "Heaviside/Dirac regularization width")
        ->capture_default_str();
    app.add_option("--dtau", cfg.solver.levelset.dtau, "Level-set time step")
        ->capture_default_str();
    app.add_option("--grid-h", cfg.solver.levelset.h, "Grid spacing")
        ->capture_default_str();
    app.add_option("--eta", cfg.solver.levelset.eta,
                   "Curvature denominator floor")
        ->capture_default_str();
    app.add_option("--pyramid-levels", cfg.solver.pyramid_levels,
                   "Coarse-to-fine levels (1 = native scale)")
        ->capture_default_str();
    app.add_option("--pyramid-factor", cfg.solver.pyramid_factor,
                   "Downsampling factor per level")
        ->capture_default_str();
    app.add_option("--presmooth", cfg.solver.presmooth_sigma,
                   "Gaussian presmoothing sigma")
        ->capture_default_str();
    app.add_flag("--share-levelsets", cfg.solver.share_levelset_pairs,
                 "Share one level-set pair across flow components");
    app.add_option("--seed", cfg.solver.seed, "Base seed")->capture_default_str();
    app.add_option("--max-mag", cfg.max_mag,
                   "Color-coding magnitude scale (0 = auto 99th percentile)")
        ->capture_default_str();

    app.add_option("--gmm-k", cfg.gmm.K, "Mixture components")->capture_default_str();
    app.add_option("--gmm-seed", cfg.gmm.seed, "Mixture fit seed")
        ->capture_default_str();
    app.add_option("--gmm-tol", cfg.gmm.tol, "EM relative tolerance")
        ->capture_default_str();
    app.add_option("--gmm-max-iter", cfg.gmm.max_iter, "EM iteration cap")
        ->capture_default_str();
    app.add_flag("--postprocess", cfg.gmm.postprocess,
                 "Apply morphological cleanup to the mask");
    app.add_option("--closing-radius", cfg.gmm.closing_radius,
                   "Disc radius for morphological closing")
        ->capture_default_str();
    app.add_option("--min-component", cfg.gmm.min_component_px,
                   "Minimum connected-component size in pixels")
        ->capture_default_str();

    std::map<std::string, sf::fields::NoiseKind> kinds{
        {"gaussian", sf::fields::NoiseKind::gaussian},
        {"salt_pepper", sf::fields::NoiseKind::salt_pepper},
        {"poisson", sf::fields::NoiseKind::poisson}};
    app.add_option("--noise-kind", cfg.noise.kind, "Noise model")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    app.add_option("--noise-mean", cfg.noise.mean, "Gaussian noise mean")
        ->capture_default_str();
    app.add_option("--noise-sigma", cfg.noise.sigma, "Gaussian noise sigma")
        ->capture_default_str();
    app.add_option("--noise-density", cfg.noise.density,
                   "Salt-and-pepper replacement fraction")
        ->capture_default_str();
    app.add_option("--noise-seed", cfg.noise.seed, "Noise RNG seed")
        ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Motion-encoded smoke segmentation toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file");

    RunConfig cfg;
    add_solver_options(app, cfg);

    std::string frame1, frame2, out, pred, gt, image, in_a, in_b;
    std::string out_flow, out_colormap, out_mask, out_fused, diagnostics;
    std::string model_in, model_out;

    CLI::App* c_flow = app.add_subcommand("flow", "Estimate flow between two frames");
    c_flow->fallthrough();
    c_flow->add_option("--frame1", frame1, "First frame")->required();
    c_flow->add_option("--frame2", frame2, "Second frame")->required();
    c_flow->add_option("--out", out, "Output .flo path")->required();
    c_flow->add_option("--diagnostics", diagnostics,
                       "Per-iteration NDJSON sink ('-' for stdout)");

    CLI::App* c_color = app.add_subcommand("colorize", "Color-code a .flo file");
    c_color->fallthrough();
    c_color->add_option("--flow", pred, "Input .flo")->required();
    c_color->add_option("--out", out, "Output PNG")->required();

    CLI::App* c_segment =
        app.add_subcommand("segment", "Segment a color map into a smoke mask");
    c_segment->fallthrough();
    c_segment->add_option("--colormap", image, "Input color map PNG")->required();
    c_segment->add_option("--mask", out_mask, "Output mask PNG")->required();
    c_segment->add_option("--fused", out_fused, "Output fused PNG");
    c_segment->add_option("--save-model", model_out, "Persist the fitted mixture");
    c_segment->add_option("--load-model", model_in,
                          "Classify with a previously saved mixture");

    CLI::App* c_eval = app.add_subcommand("eval", "Compare a flow against ground truth");
    c_eval->fallthrough();
    c_eval->add_option("--pred", pred, "Predicted .flo")->required();
    c_eval->add_option("--gt", gt, "Ground-truth .flo")->required();
    c_eval->add_option("--image", image, "Reference image for gradient metrics")
        ->required();

    CLI::App* c_ssim = app.add_subcommand("ssim", "Structural similarity of two images");
    c_ssim->fallthrough();
    c_ssim->add_option("--a", in_a, "First image")->required();
    c_ssim->add_option("--b", in_b, "Second image")->required();

    CLI::App* c_noise = app.add_subcommand("noise", "Corrupt an image with noise");
    c_noise->fallthrough();
    c_noise->add_option("--in", in_a, "Input image")->required();
    c_noise->add_option("--out", out, "Output image")->required();

    CLI::App* c_pipeline = app.add_subcommand(
        "pipeline", "Frames to flow, color map, mask and fused map in one run");
    c_pipeline->fallthrough();
    c_pipeline->add_option("--frame1", frame1, "First frame")->required();
    c_pipeline->add_option("--frame2", frame2, "Second frame")->required();
    c_pipeline->add_option("--out-flow", out_flow, "Output .flo")->required();
    c_pipeline->add_option("--out-colormap", out_colormap, "Output color map PNG")
        ->required();
    c_pipeline->add_option("--out-mask", out_mask, "Output mask PNG")->required();
    c_pipeline->add_option("--out-fused", out_fused, "Output fused PNG")->required();
    c_pipeline->add_option("--gt", gt, "Optional ground-truth .flo for metrics");
    c_pipeline->add_option("--diagnostics", diagnostics,
                           "Per-iteration NDJSON sink ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*c_flow) {
            std::ofstream diag_file;
            auto sink = make_sink(diagnostics, diag_file);
            info("estimating flow " + frame1 + " -> " + frame2);
            sf::ImageFrame f1 = sf::imgio::read_image(frame1);
            sf::ImageFrame f2 = sf::imgio::read_image(frame2);
            sf::solver::FlowResult res = sf::solver::estimate_flow(f1, f2, cfg.solver, sink);
            sf::imgio::write_flo(res.flow, out);
        } else if (*c_color) {
            sf::FlowField flow = sf::imgio::read_flo(pred);
            sf::ImageFrame cm = sf::flowviz::flow_to_color(flow, cfg.max_mag);
            sf::imgio::write_image(cm, out);
        } else if (*c_segment) {
            sf::ImageFrame cm = sf::imgio::read_image(image);
            sf::gmm::GmmModel model;
            if (!model_in.empty()) {
                model = sf::gmm::load_model(model_in);
            } else {
                model = sf::gmm::fit_gmm(sf::gmm::colormap_pixels(cm), cfg.gmm.K,
                                         cfg.gmm.seed, cfg.gmm.tol, cfg.gmm.max_iter);
            }
            if (!model_out.empty()) sf::gmm::save_model(model, model_out);
            sf::Mask mask = sf::gmm::classify(model, cm);
            if (cfg.gmm.postprocess)
                mask = sf::gmm::postprocess(mask, cfg.gmm.min_component_px,
                                            cfg.gmm.closing_radius);
            sf::imgio::write_mask(mask, out_mask);
            if (!out_fused.empty())
                sf::imgio::write_image(sf::gmm::fuse(cm, mask), out_fused);
        } else if (*c_eval) {
            sf::FlowField p = sf::imgio::read_flo(pred);
            sf::FlowField g = sf::imgio::read_flo(gt);
            sf::ImageFrame img = sf::imgio::read_image(image);
            sf::GradientTriple grad =
                sf::fields::gradients(img, img, cfg.solver.presmooth_sigma);
            auto rep = sf::metrics::evaluate(p, g, grad);
            std::cout << metrics_json(rep).dump() << "\n";
        } else if (*c_ssim) {
            sf::ImageFrame a = sf::imgio::read_image(in_a);
            sf::ImageFrame b = sf::imgio::read_image(in_b);
            nlohmann::json j{{"ssim", sf::metrics::ssim(a, b)}};
            std::cout << j.dump() << "\n";
        } else if (*c_noise) {
            sf::ImageFrame img = sf::imgio::read_image(in_a);
            sf::imgio::write_image(sf::fields::add_noise(img, cfg.noise), out);
        } else if (*c_pipeline) {
            std::ofstream diag_file;
            auto sink = make_sink(diagnostics, diag_file);
            sf::ImageFrame f1 = sf::imgio::read_image(frame1);
            sf::ImageFrame f2 = sf::imgio::read_image(frame2);
            sf::solver::PipelineOutput po =
                sf::solver::run_pipeline(f1, f2, cfg.solver, cfg.gmm, cfg.max_mag, sink);
            sf::imgio::write_flo(po.flow, out_flow);
            sf::imgio::write_image(po.colormap, out_colormap);
            sf::imgio::write_mask(po.mask, out_mask);
            sf::imgio::write_image(po.fused, out_fused);
            if (!gt.empty()) {
                sf::FlowField g = sf::imgio::read_flo(gt);
                // Same gradient source as `eval --image frame1`.
                sf::GradientTriple grad =
                    sf::fields::gradients(f1, f1, cfg.solver.presmooth_sigma);
                auto rep = sf::metrics::evaluate(po.flow, g, grad);
                std::cout << metrics_json(rep).dump() << "\n";
            }
        }
    } catch (const sf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == sf::Error::Kind::validation ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
