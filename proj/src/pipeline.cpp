#include "vc3d/pipeline.hpp"

#include "vc3d/http.hpp"

#include <json.hpp>

#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

namespace vc3d {

using nlohmann::json;
namespace fs = std::filesystem;

PipelineConfig::PipelineConfig()
{
    stage1.steps = 100;
    stage2.steps = 200;
    if (const char* env = std::getenv("VC3D_RECON_ENDPOINT"))
        recon_endpoint = env;
    if (const char* env = std::getenv("VC3D_SDS_ENDPOINT"))
        sds_endpoint = env;
}

void PipelineConfig::validate() const
{
    if (!(theta_sharp > 0 && theta_sharp < 180))
        throw Error("theta_sharp must lie in (0, 180)");
    if (extract_views < 1)
        throw Error("extract_views must be at least 1");
    if (!(spacing > 0))
        throw Error("spacing must be positive");
    cluster.validate();
    stage1.validate();
    stage2.validate();
    if (!(r_cover > 0))
        throw Error("r_cover must be positive");
    if (coverage_target != "salient" && coverage_target != "vertices")
        throw Error("coverage_target must be 'salient' or 'vertices'");
    if (objective != "residual-chamfer" && objective != "sds")
        throw Error("objective must be 'residual-chamfer' or 'sds'");
    if (views < 1)
        throw Error("views must be at least 1");
    if (!(flatten_tol > 0))
        throw Error("flatten_tol must be positive");
    style.validate();
}

void PipelineConfig::set_seed(std::uint64_t seed)
{
    cluster.rng_seed = seed;
    stage1.rng_seed = seed;
    stage2.rng_seed = seed + 1;
}

namespace {

struct Setting {
    std::string key;
    std::function<void(PipelineConfig&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw Error("invalid number for '" + key + "': " + v);
    return out;
}

std::uint64_t parse_uint(const std::string& key, const std::string& v)
{
    std::size_t used = 0;
    unsigned long long out = 0;
    try {
        if (!v.empty() && v[0] != '-')
            out = std::stoull(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size())
        throw Error("invalid non-negative integer for '" + key + "': " + v);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "1" || v == "true" || v == "yes" || v == "on")
        return true;
    if (v == "0" || v == "false" || v == "no" || v == "off")
        return false;
    throw Error("invalid boolean for '" + key + "': " + v);
}

std::string num(double v)
{
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

#define VC3D_DOUBLE(name, field)                                                                   \
    Setting{name, [](PipelineConfig& c, const std::string& v) { c.field = parse_double(name, v); }, \
            [](const PipelineConfig& c) { return num(c.field); }}
#define VC3D_UINT(name, field)                                                                     \
    Setting{name, [](PipelineConfig& c, const std::string& v) { c.field = parse_uint(name, v); },   \
            [](const PipelineConfig& c) { return std::to_string(c.field); }}
#define VC3D_STRING(name, field)                                                      \
    Setting{name, [](PipelineConfig& c, const std::string& v) { c.field = v; }, \
            [](const PipelineConfig& c) { return c.field; }}

const std::vector<Setting>& settings()
{
    static const std::vector<Setting> table = {
        VC3D_STRING("input", input),
        VC3D_STRING("image", image),
        VC3D_STRING("recon_endpoint", recon_endpoint),
        VC3D_STRING("output", output),
        VC3D_DOUBLE("theta_sharp", theta_sharp),
        VC3D_UINT("extract_views", extract_views),
        VC3D_DOUBLE("spacing", spacing),
        VC3D_DOUBLE("d_thresh", cluster.d_thresh),
        VC3D_DOUBLE("theta_thresh", cluster.theta_thresh_deg),
        VC3D_UINT("k", cluster.k),
        VC3D_UINT("tau", cluster.tau),
        Setting{"split_corners",
                [](PipelineConfig& c, const std::string& v) { c.cluster.split_corners = parse_bool("split_corners", v); },
                [](const PipelineConfig& c) { return std::string(c.cluster.split_corners ? "true" : "false"); }},
        Setting{"samples",
                [](PipelineConfig& c, const std::string& v) {
                    c.stage1.samples = c.stage2.samples = parse_uint("samples", v);
                },
                [](const PipelineConfig& c) { return std::to_string(c.stage1.samples); }},
        Setting{"lambda",
                [](PipelineConfig& c, const std::string& v) { c.stage1.lambda = c.stage2.lambda = parse_double("lambda", v); },
                [](const PipelineConfig& c) { return num(c.stage1.lambda); }},
        Setting{"noise_sigma",
                [](PipelineConfig& c, const std::string& v) {
                    c.stage1.noise_sigma = c.stage2.noise_sigma = parse_double("noise_sigma", v);
                },
                [](const PipelineConfig& c) { return num(c.stage1.noise_sigma); }},
        Setting{"lr", [](PipelineConfig& c, const std::string& v) { c.stage1.lr = c.stage2.lr = parse_double("lr", v); },
                [](const PipelineConfig& c) { return num(c.stage1.lr); }},
        Setting{"grad_clip",
                [](PipelineConfig& c, const std::string& v) {
                    c.stage1.grad_clip = c.stage2.grad_clip = parse_double("grad_clip", v);
                },
                [](const PipelineConfig& c) { return num(c.stage1.grad_clip); }},
        VC3D_UINT("stage1_steps", stage1.steps),
        VC3D_UINT("stage2_steps", stage2.steps),
        VC3D_DOUBLE("r_cover", r_cover),
        VC3D_DOUBLE("refine_jitter", refine_jitter),
        VC3D_STRING("coverage_target", coverage_target),
        VC3D_STRING("objective", objective),
        VC3D_STRING("sds_endpoint", sds_endpoint),
        VC3D_STRING("image_ref", image_ref),
        VC3D_DOUBLE("sds_timeout", sds_timeout),
        VC3D_DOUBLE("sds_weight", sds_weight),
        VC3D_UINT("views", views),
        VC3D_DOUBLE("view_elevation", view_elevation),
        VC3D_DOUBLE("view_radius", view_radius),
        Setting{"canvas",
                [](PipelineConfig& c, const std::string& v) {
                    const auto n = parse_uint("canvas", v);
                    if (n == 0 || n > 1 << 16)
                        throw Error("canvas must be in [1, 65536]");
                    c.style.width = c.style.height = static_cast<int>(n);
                },
                [](const PipelineConfig& c) { return std::to_string(c.style.width); }},
        VC3D_DOUBLE("stroke_width", style.stroke_width),
        VC3D_STRING("stroke_color", style.stroke_color),
        VC3D_DOUBLE("opacity", style.opacity),
        VC3D_DOUBLE("flatten_tol", flatten_tol),
        VC3D_UINT("curve_cap", curve_cap),
        Setting{"seed", [](PipelineConfig& c, const std::string& v) { c.set_seed(parse_uint("seed", v)); },
                [](const PipelineConfig& c) { return std::to_string(c.cluster.rng_seed); }},
    };
    return table;
}

#undef VC3D_DOUBLE
#undef VC3D_UINT
#undef VC3D_STRING

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const Setting& s : settings())
        keys.push_back(s.key);
    return keys;
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value)
{
    for (const Setting& s : settings()) {
        if (s.key == key) {
            s.set(cfg, value);
            return;
        }
    }
    throw Error("unknown config key '" + key + "'");
}

void apply_config_text(PipelineConfig& cfg, const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error("config line " + std::to_string(line_no) + ": expected key = value");
        // A '#' after whitespace ends the value, so "stroke_color = #ff0000"
        // keeps its color.
        std::string value = trim(line.substr(eq + 1));
        for (std::size_t i = 1; i < value.size(); ++i)
            if (value[i] == '#' && std::isspace(static_cast<unsigned char>(value[i - 1]))) {
                value = trim(value.substr(0, i));
                break;
            }
        apply_setting(cfg, trim(line.substr(0, eq)), value);
    }
}

std::map<std::string, std::string> config_echo(const PipelineConfig& cfg)
{
    std::map<std::string, std::string> out;
    for (const Setting& s : settings())
        out[s.key] = s.get(cfg);
    return out;
}

int stage_exit_code(const std::string& stage)
{
    static const std::map<std::string, int> codes = {
        {"config", 2}, {"fetch", 3},  {"load", 4},   {"extract", 5}, {"cluster", 6},
        {"fit", 7},    {"refine", 8}, {"render", 9}, {"write", 10},  {"metrics", 11},
    };
    const auto it = codes.find(stage);
    return it == codes.end() ? 1 : it->second;
}

StageError::StageError(std::string stage, const std::string& what)
    : Error(stage + ": " + what), stage_(std::move(stage))
{
}

int StageError::exit_code() const { return stage_exit_code(stage_); }

namespace {

using Clock = std::chrono::steady_clock;

// Runs fn, converting library errors into a StageError for `stage` and
// recording the elapsed seconds.
template <typename Fn>
auto stage(const std::string& name, std::map<std::string, double>& seconds, Fn&& fn)
{
    const auto t0 = Clock::now();
    struct Timer {
        std::map<std::string, double>& s;
        const std::string& n;
        Clock::time_point t0;
        ~Timer() { s[n] += std::chrono::duration<double>(Clock::now() - t0).count(); }
    } timer{seconds, name, t0};
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

json opt_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

}  // namespace

Extraction extract_salient(const LoadedMesh& loaded, const PipelineConfig& cfg)
{
    Extraction ex;
    ex.dropped_faces = loaded.dropped_faces;
    ex.normalized = normalize_mesh(loaded.mesh);
    ex.adjacency = build_edge_adjacency(ex.normalized.mesh);
    ex.salient = extract_salient_edges(ex.normalized.mesh, ex.adjacency, cfg.theta_sharp, cfg.extract_views);
    const auto raw = sample_salient_points(ex.normalized.mesh, ex.adjacency, ex.salient, cfg.spacing);
    if (raw.size() < cfg.cluster.k)
        throw Error("salient cloud has " + std::to_string(raw.size()) + " points, fewer than k");
    ex.cloud = estimate_orientations(raw, cfg.cluster.k);
    return ex;
}

StageOneResult run_stage1(const Extraction& ex, const PipelineConfig& cfg)
{
    StageOneResult r;
    r.clusters = cluster_all(ex.cloud, cfg.cluster);
    if (r.clusters.empty())
        throw Error("no cluster survived the tau filter");
    r.fit = fit_stage1(r.clusters, ex.cloud, cfg.stage1);
    r.fit.graphic.transform = ex.normalized.transform;
    return r;
}

namespace {

double subset_ratio(const CoverageReport& full_after, const std::vector<std::size_t>& subset)
{
    if (subset.empty())
        return 1.0;
    std::size_t n = 0;
    for (std::size_t i : subset)
        if (full_after.covered[i])
            ++n;
    return static_cast<double>(n) / static_cast<double>(subset.size());
}

}  // namespace

StageTwoResult run_stage2(const Extraction& ex, const VectorGraphic3D& stage1, const PipelineConfig& cfg)
{
    StageTwoResult r;
    VectorGraphic3D frozen = stage1;
    for (CubicBezier3& c : frozen.curves)
        c.frozen = true;
    r.refined.graphic = frozen;

    SalientPointCloud vertex_cloud;
    if (cfg.coverage_target == "vertices") {
        vertex_cloud.points = ex.normalized.mesh.vertices;
        if (vertex_cloud.size() >= cfg.cluster.k)
            vertex_cloud = estimate_orientations(vertex_cloud, cfg.cluster.k);
    }
    const SalientPointCloud& target_cloud = cfg.coverage_target == "vertices" ? vertex_cloud : ex.cloud;

    const CurveSamples s1 = sample_curves(frozen.curves, cfg.stage2.samples);
    r.before = coverage(target_cloud.points, s1.points, cfg.r_cover);
    r.uncovered_ratio_before = subset_ratio(r.before, r.before.uncovered);
    r.uncovered_ratio_after = r.uncovered_ratio_before;
    if (r.before.uncovered.empty())
        return r;

    auto new_curves = init_refinement_curves(r.before.uncovered, target_cloud, cfg.cluster, cfg.refine_jitter);
    if (new_curves.empty())
        return r;
    r.noop = false;
    r.new_curves = new_curves.size();

    std::unique_ptr<RefinementObjective> objective;
    if (cfg.objective == "sds") {
        if (cfg.sds_endpoint.empty())
            throw Error("objective 'sds' needs sds_endpoint (or VC3D_SDS_ENDPOINT)");
        objective = sds_objective({cfg.sds_endpoint, cfg.image_ref, cfg.sds_timeout, cfg.sds_weight});
    } else {
        std::vector<Vec3> target;
        for (std::size_t i : r.before.uncovered)
            target.push_back(target_cloud.points[i]);
        objective = residual_chamfer_objective(std::move(target), cfg.stage2);
    }
    r.refined = refine(frozen, std::move(new_curves), *objective, cfg.stage2);

    const CurveSamples s2 = sample_curves(r.refined.graphic.curves, cfg.stage2.samples);
    r.uncovered_ratio_after =
        subset_ratio(coverage(target_cloud.points, s2.points, cfg.r_cover), r.before.uncovered);
    return r;
}

std::string RunManifest::to_json() const
{
    json doc;
    doc["config"] = config;
    doc["transform"] = {{"center", {transform.center.x(), transform.center.y(), transform.center.z()}},
                        {"scale", transform.scale}};
    doc["mesh_source"] = mesh_source;
    doc["extraction"] = {{"dropped_faces", dropped_faces},
                         {"salient_edges", salient_edges},
                         {"sharp_edges", sharp_edges},
                         {"salient_points", salient_points}};
    doc["stage1"] = {{"clusters", clusters},
                     {"curves", stage1_curves},
                     {"initial_loss", stage1_initial_loss},
                     {"final_loss", stage1_final_loss},
                     {"coverage", coverage_before}};
    doc["stage2"] = {{"noop", stage2_noop},
                     {"curves", stage2_curves},
                     {"initial_objective", opt_json(stage2_initial_objective)},
                     {"final_objective", opt_json(stage2_final_objective)},
                     {"uncovered_coverage_before", uncovered_coverage_before},
                     {"uncovered_coverage_after", uncovered_coverage_after},
                     {"coverage", coverage_after}};
    doc["curve_count"] = stage1_curves + stage2_curves;
    doc["seconds"] = seconds;
    doc["warnings"] = warnings;
    return doc.dump(2) + "\n";
}

namespace {

struct Loaded {
    LoadedMesh mesh;
    std::string source;
};

Loaded load_input(const PipelineConfig& cfg, std::map<std::string, double>& seconds)
{
    Loaded out;
    fs::path path = cfg.input;
    if (!cfg.image.empty()) {
        path = stage("fetch", seconds, [&] {
            if (cfg.recon_endpoint.empty())
                throw Error("image input needs recon_endpoint (or VC3D_RECON_ENDPOINT)");
            return fetch_mesh(cfg.image, cfg.recon_endpoint, fs::path(cfg.output) / "fetched", cfg.sds_timeout);
        });
        out.source = "fetched:" + cfg.recon_endpoint + " image=" + cfg.image + " -> " + path.string();
    } else {
        out.source = path.string();
    }
    out.mesh = stage("load", seconds, [&] {
        if (path.empty())
            throw Error("no input mesh given");
        return load_mesh(path);
    });
    return out;
}

void fill_extraction(RunManifest& m, const Extraction& ex)
{
    m.transform = ex.normalized.transform;
    m.dropped_faces = ex.dropped_faces;
    m.salient_edges = ex.salient.size();
    m.sharp_edges = ex.salient.count(EdgeLabel::Sharp);
    m.salient_points = ex.cloud.size();
    if (ex.dropped_faces > 0)
        m.warnings.push_back("dropped " + std::to_string(ex.dropped_faces) + " degenerate faces");
}

double clean_loss(const VectorGraphic3D& g, const Extraction& ex, const FitConfig& cfg)
{
    const CurveSamples s = sample_curves(g.curves, cfg.samples);
    return chamfer_loss(s.points, ex.cloud.points, cfg.lambda);
}

double coverage_ratio(const VectorGraphic3D& g, const Extraction& ex, const PipelineConfig& cfg)
{
    const CurveSamples s = sample_curves(g.curves, cfg.stage1.samples);
    return coverage(ex.cloud.points, s.points, cfg.r_cover).ratio;
}

void check_cap(RunManifest& m, std::size_t count, std::size_t cap)
{
    if (count > cap)
        m.warnings.push_back("curve count " + std::to_string(count) + " exceeds cap " + std::to_string(cap));
}

void write_views(const fs::path& dir, const std::vector<std::string>& svgs)
{
    for (std::size_t i = 0; i < svgs.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "view_%02zu.svg", i);
        write_text_file(dir / name, svgs[i]);
    }
}

std::vector<std::string> render_all(const VectorGraphic3D& g, const PipelineConfig& cfg)
{
    return render_views(g, cfg.views, cfg.view_elevation, cfg.view_radius, cfg.style, cfg.flatten_tol);
}

void validate_config(const PipelineConfig& cfg, std::map<std::string, double>& seconds)
{
    stage("config", seconds, [&] { cfg.validate(); });
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& cfg)
{
    RunManifest m;
    validate_config(cfg, m.seconds);
    m.config = config_echo(cfg);
    const Loaded in = load_input(cfg, m.seconds);
    m.mesh_source = in.source;

    const Extraction ex = stage("extract", m.seconds, [&] { return extract_salient(in.mesh, cfg); });
    fill_extraction(m, ex);

    const StageOneResult s1 = stage("fit", m.seconds, [&] { return run_stage1(ex, cfg); });
    const VectorGraphic3D stage1 = round_trip(s1.fit.graphic);
    m.clusters = s1.clusters.size();
    m.stage1_curves = stage1.curves.size();
    m.stage1_initial_loss = s1.fit.initial_loss;
    m.stage1_final_loss = clean_loss(stage1, ex, cfg.stage1);
    m.coverage_before = coverage_ratio(stage1, ex, cfg);

    const StageTwoResult s2 = stage("refine", m.seconds, [&] { return run_stage2(ex, stage1, cfg); });
    const VectorGraphic3D final_graphic = round_trip(s2.refined.graphic);
    m.stage2_noop = s2.noop;
    m.stage2_curves = s2.new_curves;
    if (!s2.refined.objective_history.empty()) {
        m.stage2_initial_objective = s2.refined.objective_history.front();
        m.stage2_final_objective = s2.refined.objective_history.back();
    }
    m.uncovered_coverage_before = s2.uncovered_ratio_before;
    m.uncovered_coverage_after = s2.uncovered_ratio_after;
    m.coverage_after = coverage_ratio(final_graphic, ex, cfg);
    check_cap(m, final_graphic.curves.size(), cfg.curve_cap);

    const auto svgs = stage("render", m.seconds, [&] { return render_all(final_graphic, cfg); });

    stage("write", m.seconds, [&] {
        const fs::path out = cfg.output;
        write_text_file(out / "curves.json", curves_to_json(final_graphic));
        write_text_file(out / "stage1_curves.json", curves_to_json(stage1));
        write_text_file(out / "clusters.json", clusters_to_json(s1.clusters, cfg.cluster));
        write_text_file(out / "coverage_stage1.json", coverage_to_json(s2.before));
        write_text_file(out / "loss_stage1.csv", loss_csv(s1.fit.loss_history));
        write_text_file(out / "loss_stage2.csv", loss_csv(s2.refined.objective_history));
        write_views(out / "views", svgs);
        write_text_file(out / "manifest.json", m.to_json());
    });
    return m;
}

RunManifest run_fit(const PipelineConfig& cfg)
{
    RunManifest m;
    validate_config(cfg, m.seconds);
    m.config = config_echo(cfg);
    const Loaded in = load_input(cfg, m.seconds);
    m.mesh_source = in.source;
    const Extraction ex = stage("extract", m.seconds, [&] { return extract_salient(in.mesh, cfg); });
    fill_extraction(m, ex);

    const StageOneResult s1 = stage("fit", m.seconds, [&] { return run_stage1(ex, cfg); });
    const VectorGraphic3D stage1 = round_trip(s1.fit.graphic);
    m.clusters = s1.clusters.size();
    m.stage1_curves = stage1.curves.size();
    m.stage1_initial_loss = s1.fit.initial_loss;
    m.stage1_final_loss = clean_loss(stage1, ex, cfg.stage1);
    m.coverage_before = m.coverage_after = coverage_ratio(stage1, ex, cfg);
    check_cap(m, stage1.curves.size(), cfg.curve_cap);

    stage("write", m.seconds, [&] {
        const fs::path out = cfg.output;
        write_text_file(out / "curves.json", curves_to_json(stage1));
        write_text_file(out / "clusters.json", clusters_to_json(s1.clusters, cfg.cluster));
        write_text_file(out / "loss_stage1.csv", loss_csv(s1.fit.loss_history));
        write_text_file(out / "manifest.json", m.to_json());
    });
    return m;
}

RunManifest run_refine(const PipelineConfig& cfg, const fs::path& curves_path)
{
    RunManifest m;
    validate_config(cfg, m.seconds);
    m.config = config_echo(cfg);
    const VectorGraphic3D stage1 = stage("load", m.seconds, [&] { return curves_from_json(read_text_file(curves_path)); });
    const Loaded in = load_input(cfg, m.seconds);
    m.mesh_source = in.source;
    const Extraction ex = stage("extract", m.seconds, [&] { return extract_salient(in.mesh, cfg); });
    fill_extraction(m, ex);
    m.stage1_curves = stage1.curves.size();
    m.coverage_before = coverage_ratio(stage1, ex, cfg);

    const StageTwoResult s2 = stage("refine", m.seconds, [&] { return run_stage2(ex, stage1, cfg); });
    VectorGraphic3D final_graphic = round_trip(s2.refined.graphic);
    final_graphic.transform = stage1.transform;
    m.stage2_noop = s2.noop;
    m.stage2_curves = s2.new_curves;
    if (!s2.refined.objective_history.empty()) {
        m.stage2_initial_objective = s2.refined.objective_history.front();
        m.stage2_final_objective = s2.refined.objective_history.back();
    }
    m.uncovered_coverage_before = s2.uncovered_ratio_before;
    m.uncovered_coverage_after = s2.uncovered_ratio_after;
    m.coverage_after = coverage_ratio(final_graphic, ex, cfg);
    check_cap(m, final_graphic.curves.size(), cfg.curve_cap);

    stage("write", m.seconds, [&] {
        const fs::path out = cfg.output;
        write_text_file(out / "curves.json", curves_to_json(final_graphic));
        write_text_file(out / "coverage_stage1.json", coverage_to_json(s2.before));
        write_text_file(out / "loss_stage2.csv", loss_csv(s2.refined.objective_history));
        write_text_file(out / "manifest.json", m.to_json());
    });
    return m;
}

std::vector<fs::path> run_render(const PipelineConfig& cfg, const fs::path& curves_path)
{
    std::map<std::string, double> seconds;
    validate_config(cfg, seconds);
    const VectorGraphic3D g = stage("load", seconds, [&] { return curves_from_json(read_text_file(curves_path)); });
    const auto svgs = stage("render", seconds, [&] { return render_all(g, cfg); });
    std::vector<fs::path> paths;
    stage("write", seconds, [&] {
        const fs::path dir = fs::path(cfg.output) / "views";
        write_views(dir, svgs);
        for (std::size_t i = 0; i < svgs.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "view_%02zu.svg", i);
            paths.push_back(dir / name);
        }
    });
    return paths;
}

std::string MetricsReport::to_json() const
{
    json doc;
    doc["chamfer"] = opt_json(chamfer);
    if (!chamfer_error.empty())
        doc["chamfer_error"] = chamfer_error;
    doc["coverage"] = coverage;
    doc["r_cover"] = r_cover;
    doc["curve_count"] = curve_count;
    doc["total_length"] = total_length;
    return doc.dump(2) + "\n";
}

MetricsReport compute_metrics(const VectorGraphic3D& graphic, const Extraction& ex, const PipelineConfig& cfg)
{
    const NormalizeTransform& a = graphic.transform;
    const NormalizeTransform& b = ex.normalized.transform;
    const double extent = 1.0 / b.scale;
    if ((a.center - b.center).norm() > 1e-6 * extent || std::abs(a.scale / b.scale - 1.0) > 1e-6)
        throw Error("curve set was fitted under a different normalization transform than this mesh");

    MetricsReport r;
    r.r_cover = cfg.r_cover;
    r.curve_count = graphic.curves.size();
    for (const CubicBezier3& c : graphic.curves)
        r.total_length += arc_length(c);
    if (graphic.curves.empty()) {
        r.coverage = 0.0;
        r.chamfer_error = "chamfer undefined for an empty curve set";
        return r;
    }
    const CurveSamples s = sample_curves(graphic.curves, cfg.stage1.samples);
    r.coverage = coverage(ex.cloud.points, s.points, cfg.r_cover).ratio;
    r.chamfer = chamfer_loss(s.points, ex.cloud.points, 1.0);
    return r;
}

MetricsReport compute_metrics(const fs::path& curves_path, const PipelineConfig& cfg)
{
    std::map<std::string, double> seconds;
    validate_config(cfg, seconds);
    const VectorGraphic3D g = stage("load", seconds, [&] { return curves_from_json(read_text_file(curves_path)); });
    const Loaded in = load_input(cfg, seconds);
    const Extraction ex = stage("extract", seconds, [&] { return extract_salient(in.mesh, cfg); });
    return stage("metrics", seconds, [&] { return compute_metrics(g, ex, cfg); });
}

fs::path fetch_mesh(const fs::path& image, const std::string& endpoint, const fs::path& dest_dir, double timeout_s)
{
    const std::string bytes = read_text_file(image);
    const HttpResponse res = http_post(endpoint, bytes, "application/octet-stream", timeout_s);
    if (res.status < 200 || res.status >= 300)
        throw Error("reconstruction service returned HTTP " + std::to_string(res.status));

    const bool ply = res.body.rfind("ply", 0) == 0 || res.content_type.find("ply") != std::string::npos;
    try {
        parse_mesh(res.body, ply ? MeshFormat::Ply : MeshFormat::Obj);
    } catch (const Error& e) {
        throw Error(std::string("invalid mesh payload: ") + e.what());
    }
    const fs::path out = dest_dir / (image.stem().string() + (ply ? ".ply" : ".obj"));
    write_text_file(out, res.body);
    return out;
}

}  // namespace vc3d
