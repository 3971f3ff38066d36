#pragma once

#include "vc3d/clustering.hpp"
#include "vc3d/curvefit.hpp"
#include "vc3d/io.hpp"
#include "vc3d/mesh.hpp"
#include "vc3d/refine.hpp"
#include "vc3d/render.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vc3d {

struct PipelineConfig {
    std::string input;           // mesh file (OBJ / ASCII PLY)
    std::string image;           // when set, the mesh is fetched from recon_endpoint
    std::string recon_endpoint;  // default: $VC3D_RECON_ENDPOINT
    std::string output = "vc3d_out";

    double theta_sharp = 30.0;
    std::size_t extract_views = 16;
    double spacing = 0.005;

    ClusterConfig cluster;
    FitConfig stage1;
    FitConfig stage2;
    double r_cover = 0.05;
    // Points Stage II must cover: "salient" (the salient cloud) or
    // "vertices" (the normalized mesh vertices).
    std::string coverage_target = "salient";
    double refine_jitter = kRefineJitter;

    std::string objective = "residual-chamfer";  // or "sds"
    std::string sds_endpoint;                    // default: $VC3D_SDS_ENDPOINT
    std::string image_ref;
    double sds_timeout = 120.0;
    double sds_weight = 2e-4;

    std::size_t views = 12;
    double view_elevation = kViewElevation;
    double view_radius = kViewRadius;
    RenderStyle style;
    double flatten_tol = 0.1;

    std::size_t curve_cap = 100;  // soft; exceeding it only warns

    PipelineConfig();
    void validate() const;
    // Sets the seed of every stochastic stage.
    void set_seed(std::uint64_t seed);
};

// Flat key names accepted by config files and CLI flags.
std::vector<std::string> config_keys();
// Throws vc3d::Error for an unknown key or unparsable value.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);
// "key = value" lines. '#' starts a comment at the beginning of a line or
// after whitespace following a value.
void apply_config_text(PipelineConfig& cfg, const std::string& text);
std::map<std::string, std::string> config_echo(const PipelineConfig& cfg);

// Failure tagged with the pipeline stage it happened in; exit_code() is the
// process exit status the CLI uses for it.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what);
    const std::string& stage() const { return stage_; }
    int exit_code() const;

private:
    std::string stage_;
};

int stage_exit_code(const std::string& stage);

struct Extraction {
    NormalizedMesh normalized;
    EdgeAdjacency adjacency;
    EdgeSet salient;
    SalientPointCloud cloud;  // orientations estimated
    std::size_t dropped_faces = 0;
};

Extraction extract_salient(const LoadedMesh& loaded, const PipelineConfig& cfg);

struct StageOneResult {
    std::vector<Cluster> clusters;
    FitResult fit;
};

StageOneResult run_stage1(const Extraction& ex, const PipelineConfig& cfg);

struct StageTwoResult {
    CoverageReport before;
    std::size_t new_curves = 0;
    bool noop = true;
    RefineResult refined;
    double uncovered_ratio_before = 0.0;  // coverage of the initially uncovered subset
    double uncovered_ratio_after = 0.0;
};

// stage1 curves are frozen and kept bit-identical.
StageTwoResult run_stage2(const Extraction& ex, const VectorGraphic3D& stage1, const PipelineConfig& cfg);

struct RunManifest {
    std::map<std::string, std::string> config;
    NormalizeTransform transform;
    std::string mesh_source;
    std::size_t dropped_faces = 0;
    std::size_t salient_edges = 0;
    std::size_t sharp_edges = 0;
    std::size_t salient_points = 0;
    std::size_t clusters = 0;
    std::size_t stage1_curves = 0;
    std::size_t stage2_curves = 0;
    double stage1_initial_loss = 0.0;
    double stage1_final_loss = 0.0;
    std::optional<double> stage2_initial_objective;
    std::optional<double> stage2_final_objective;
    bool stage2_noop = true;
    double coverage_before = 0.0;  // after Stage I
    double coverage_after = 0.0;   // after Stage II
    double uncovered_coverage_before = 0.0;
    double uncovered_coverage_after = 0.0;
    std::map<std::string, double> seconds;
    std::vector<std::string> warnings;

    std::string to_json() const;
};

// Full mesh -> Stage I -> Stage II -> SVG run. All artifacts are written at
// the end, so a failing stage leaves no partial output.
RunManifest run_pipeline(const PipelineConfig& cfg);

// Stage I only; writes curves.json, clusters.json, loss_stage1.csv, manifest.json.
RunManifest run_fit(const PipelineConfig& cfg);

// Stage II on a saved Stage I curve set.
RunManifest run_refine(const PipelineConfig& cfg, const std::filesystem::path& curves_path);

// Writes views/view_XX.svg for a curve file; returns the written paths.
std::vector<std::filesystem::path> run_render(const PipelineConfig& cfg, const std::filesystem::path& curves_path);

struct MetricsReport {
    std::optional<double> chamfer;  // symmetric, lambda = 1, noise-free
    std::string chamfer_error;
    double coverage = 0.0;
    double r_cover = 0.0;
    std::size_t curve_count = 0;
    double total_length = 0.0;  // normalized units

    std::string to_json() const;
};

MetricsReport compute_metrics(const VectorGraphic3D& graphic, const Extraction& ex, const PipelineConfig& cfg);
MetricsReport compute_metrics(const std::filesystem::path& curves_path, const PipelineConfig& cfg);

// POSTs the image bytes to a reconstruction service and stores the returned
// mesh (validated with the mesh loader) under dest_dir.
std::filesystem::path fetch_mesh(const std::filesystem::path& image, const std::string& endpoint,
                                 const std::filesystem::path& dest_dir, double timeout_s = 120.0);

}  // namespace vc3d
