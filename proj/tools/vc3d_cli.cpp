// vc3d: mesh -> 3D Bezier curve graphic -> multi-view SVG.

#include "vc3d/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

namespace {

struct Settings {
    std::string config_file;
    std::map<std::string, std::string> overrides;
};

void add_config_flags(CLI::App* app, Settings& s)
{
    app->add_option("--config", s.config_file, "key = value config file; flags override it");
    for (const std::string& key : vc3d::config_keys()) {
        app->add_option_function<std::string>(
            "--" + key, [&s, key](const std::string& v) { s.overrides[key] = v; }, "config: " + key);
    }
}

vc3d::PipelineConfig resolve(const Settings& s)
{
    vc3d::PipelineConfig cfg;
    try {
        if (!s.config_file.empty())
            vc3d::apply_config_text(cfg, vc3d::read_text_file(s.config_file));
        for (const auto& [k, v] : s.overrides)
            vc3d::apply_setting(cfg, k, v);
    } catch (const vc3d::Error& e) {
        throw vc3d::StageError("config", e.what());
    }
    return cfg;
}

void print_summary(const vc3d::RunManifest& m, const std::string& out)
{
    std::cout << "salient points: " << m.salient_points << "\n"
              << "stage1 curves:  " << m.stage1_curves << "\n"
              << "stage2 curves:  " << m.stage2_curves << (m.stage2_noop ? " (no-op)" : "") << "\n"
              << "coverage:       " << m.coverage_before << " -> " << m.coverage_after << "\n"
              << "output:         " << out << "\n";
    for (const auto& w : m.warnings)
        std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Convert a triangle mesh into a 3D cubic Bezier vector graphic and render it to SVG"};
    app.require_subcommand(1);

    Settings run_s, fit_s, refine_s, render_s, metrics_s;
    std::string refine_curves, render_curves, metrics_curves;

    auto* run = app.add_subcommand("run", "full pipeline: extract, fit, refine, render");
    add_config_flags(run, run_s);
    auto* fit = app.add_subcommand("fit", "salient extraction, clustering and curve fitting only");
    add_config_flags(fit, fit_s);
    auto* refine = app.add_subcommand("refine", "add refinement curves to a fitted curve set");
    add_config_flags(refine, refine_s);
    refine->add_option("--curves", refine_curves, "fitted curves.json")->required();
    auto* render = app.add_subcommand("render", "render a curve set to SVG views");
    add_config_flags(render, render_s);
    render->add_option("--curves", render_curves, "curves.json")->required();
    auto* metrics = app.add_subcommand("metrics", "geometric metrics of a curve set against its mesh");
    add_config_flags(metrics, metrics_s);
    metrics->add_option("--curves", metrics_curves, "curves.json")->required();

    std::string fetch_image, fetch_endpoint, fetch_out = ".";
    double fetch_timeout = 120.0;
    auto* fetch = app.add_subcommand("fetch-mesh", "request a mesh for an image from a reconstruction service");
    fetch->add_option("--image", fetch_image, "input image")->required();
    fetch->add_option("--endpoint", fetch_endpoint, "service URL (default: $VC3D_RECON_ENDPOINT)");
    fetch->add_option("--out", fetch_out, "destination directory");
    fetch->add_option("--timeout", fetch_timeout, "seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            const auto cfg = resolve(run_s);
            print_summary(vc3d::run_pipeline(cfg), cfg.output);
        } else if (fit->parsed()) {
            const auto cfg = resolve(fit_s);
            print_summary(vc3d::run_fit(cfg), cfg.output);
        } else if (refine->parsed()) {
            const auto cfg = resolve(refine_s);
            print_summary(vc3d::run_refine(cfg, refine_curves), cfg.output);
        } else if (render->parsed()) {
            const auto cfg = resolve(render_s);
            for (const auto& p : vc3d::run_render(cfg, render_curves))
                std::cout << p.string() << "\n";
        } else if (metrics->parsed()) {
            const auto cfg = resolve(metrics_s);
            const auto report = vc3d::compute_metrics(metrics_curves, cfg);
            std::cout << report.to_json();
            if (!report.chamfer) {
                std::cerr << "error: " << report.chamfer_error << "\n";
                return vc3d::stage_exit_code("metrics");
            }
        } else if (fetch->parsed()) {
            if (fetch_endpoint.empty())
                fetch_endpoint = vc3d::PipelineConfig().recon_endpoint;
            if (fetch_endpoint.empty())
                throw vc3d::StageError("fetch", "no endpoint given (--endpoint or VC3D_RECON_ENDPOINT)");
            try {
                std::cout << vc3d::fetch_mesh(fetch_image, fetch_endpoint, fetch_out, fetch_timeout).string() << "\n";
            } catch (const vc3d::Error& e) {
                throw vc3d::StageError("fetch", e.what());
            }
        }
    } catch (const vc3d::StageError& e) {
        std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
