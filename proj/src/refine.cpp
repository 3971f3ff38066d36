#include "vc3d/refine.hpp"

#include "vc3d/http.hpp"

#include <json.hpp>

#include <random>

namespace vc3d {

CoverageReport coverage(std::span<const Vec3> salient, std::span<const Vec3> curve_pts, double r_cover)
{
    if (!(r_cover > 0))
        throw Error("r_cover must be positive");
    if (salient.empty())
        throw Error("coverage: empty salient cloud");
    CoverageReport rep;
    rep.r_cover = r_cover;
    rep.covered.assign(salient.size(), false);
    if (!curve_pts.empty()) {
        const KdTree tree(curve_pts);
        const double r2 = r_cover * r_cover;
        for (std::size_t i = 0; i < salient.size(); ++i)
            rep.covered[i] = tree.nearest(salient[i]).dist2 <= r2;
    }
    std::size_t n_covered = 0;
    for (std::size_t i = 0; i < salient.size(); ++i) {
        if (rep.covered[i])
            ++n_covered;
        else
            rep.uncovered.push_back(i);
    }
    rep.ratio = static_cast<double>(n_covered) / static_cast<double>(salient.size());
    return rep;
}

namespace {

class ResidualChamfer final : public RefinementObjective {
public:
    ResidualChamfer(std::vector<Vec3> target, const FitConfig& cfg, double coverage_weight)
        : target_(std::move(target)), tree_(target_), cfg_(cfg), coverage_weight_(coverage_weight)
    {
        if (target_.empty())
            throw Error("residual chamfer: no uncovered points");
    }

    std::string name() const override { return "residual-chamfer"; }

    ObjectiveEval evaluate(const CurveSamples& combined, std::span<const CubicBezier3> curves,
                           std::size_t step) override
    {
        std::vector<std::size_t> live;
        std::vector<Vec3> pts;
        for (std::size_t j = 0; j < combined.size(); ++j) {
            if (!curves[combined.curve[j]].frozen) {
                live.push_back(j);
                pts.push_back(combined.points[j]);
            }
        }
        ObjectiveEval out;
        out.point_grads.assign(combined.size(), Vec3::Zero());
        if (pts.empty()) {
            out.value = 0.0;
            return out;
        }
        const auto noisy = add_noise(pts, cfg_.noise_sigma, step_seed(cfg_.rng_seed, step));
        const ChamferEval e = chamfer_value_and_grad(noisy, target_, cfg_.lambda, coverage_weight_, &tree_);
        out.value = e.loss;
        for (std::size_t i = 0; i < live.size(); ++i)
            out.point_grads[live[i]] = e.grad[i];
        return out;
    }

private:
    std::vector<Vec3> target_;
    KdTree tree_;
    FitConfig cfg_;
    double coverage_weight_;
};

class SdsObjective final : public RefinementObjective {
public:
    explicit SdsObjective(SdsEndpoint ep) : ep_(std::move(ep)) {}

    std::string name() const override { return "sds"; }

    ObjectiveEval evaluate(const CurveSamples& combined, std::span<const CubicBezier3> curves,
                           std::size_t step) override
    {
        std::size_t start = combined.size();
        for (std::size_t j = 0; j < combined.size(); ++j) {
            const bool live = !curves[combined.curve[j]].frozen;
            if (live && start == combined.size())
                start = j;
            if (!live && start != combined.size())
                throw Error("sds: unfrozen curves must follow all frozen curves");
        }

        nlohmann::json req;
        auto& pts = req["points"] = nlohmann::json::array();
        for (const Vec3& p : combined.points)
            pts.push_back({p.x(), p.y(), p.z()});
        req["unfrozen_range"] = {start, combined.size()};
        req["image_ref"] = ep_.image_ref;
        req["step"] = step;

        const HttpResponse res = http_post(ep_.url, req.dump(), "application/json", ep_.timeout_s);
        if (res.status < 200 || res.status >= 300)
            throw Error("sds service returned HTTP " + std::to_string(res.status));

        ObjectiveEval out;
        out.point_grads.assign(combined.size(), Vec3::Zero());
        try {
            const auto body = nlohmann::json::parse(res.body);
            const auto& grads = body.at("grads");
            if (!grads.is_array() || grads.size() != combined.size() - start)
                throw Error("sds: expected " + std::to_string(combined.size() - start) + " gradients");
            for (std::size_t i = 0; i < grads.size(); ++i) {
                const auto& g = grads[i];
                if (!g.is_array() || g.size() != 3)
                    throw Error("sds: malformed gradient entry");
                out.point_grads[start + i] =
                    ep_.weight * Vec3(g[0].get<double>(), g[1].get<double>(), g[2].get<double>());
            }
            if (body.contains("loss") && body["loss"].is_number())
                out.value = body["loss"].get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("sds: malformed response: ") + e.what());
        }
        return out;
    }

private:
    SdsEndpoint ep_;
};

}  // namespace

std::unique_ptr<RefinementObjective> residual_chamfer_objective(std::vector<Vec3> uncovered_points,
                                                                const FitConfig& cfg, double coverage_weight)
{
    return std::make_unique<ResidualChamfer>(std::move(uncovered_points), cfg, coverage_weight);
}

std::unique_ptr<RefinementObjective> sds_objective(SdsEndpoint endpoint)
{
    return std::make_unique<SdsObjective>(std::move(endpoint));
}

std::vector<CubicBezier3> init_refinement_curves(std::span<const std::size_t> uncovered,
                                                 const SalientPointCloud& cloud, const ClusterConfig& cfg,
                                                 double jitter_sigma)
{
    std::vector<CubicBezier3> out;
    if (uncovered.empty())
        return out;

    SalientPointCloud sub;
    for (std::size_t i : uncovered)
        sub.points.push_back(cloud.points[i]);
    if (cloud.has_orientations()) {
        for (std::size_t i : uncovered) {
            sub.orientations.push_back(cloud.orientations[i]);
            sub.degenerate.push_back(cloud.degenerate.empty() ? false : cloud.degenerate[i]);
        }
    } else {
        if (sub.size() < cfg.k)
            return out;
        sub = estimate_orientations(sub, cfg.k);
    }

    ClusterConfig residual = cfg;
    residual.tau = std::max<std::size_t>(1, cfg.tau / 2);
    const auto clusters = cluster_all(sub, residual);

    std::mt19937_64 rng(step_seed(cfg.rng_seed, 0x5eed));
    std::normal_distribution<double> gauss(0.0, jitter_sigma > 0 ? jitter_sigma : 1.0);
    auto jitter = [&](Vec3 p) {
        if (jitter_sigma > 0)
            for (int k = 0; k < 3; ++k)
                p[k] += gauss(rng);
        return p;
    };

    for (const Cluster& c : clusters) {
        if (c.size() < 2)
            continue;
        CubicBezier3 curve = init_curves_from_cluster(c, sub);
        if (is_line_degenerate(curve)) {
            const Vec3 a = jitter(curve.p[0]);
            const Vec3 b = jitter(curve.p[3]);
            curve = line_curve(a, b);
        } else {
            for (Vec3& p : curve.p)
                p = jitter(p);
        }
        curve.provenance = Provenance::Stage2;
        curve.frozen = false;
        out.push_back(curve);
    }
    return out;
}

RefineResult refine(const VectorGraphic3D& graphic, std::vector<CubicBezier3> new_curves,
                    RefinementObjective& objective, const FitConfig& cfg, const RefineObserver& observer)
{
    RefineResult out;
    out.graphic = graphic;
    if (new_curves.empty())
        return out;
    cfg.validate();

    const std::size_t n_frozen = graphic.curves.size();
    std::vector<CubicBezier3> work = graphic.curves;
    for (CubicBezier3& c : work)
        c.frozen = true;
    for (CubicBezier3& c : new_curves)
        c.frozen = false;
    work.insert(work.end(), new_curves.begin(), new_curves.end());

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const CurveSamples samples = sample_curves(work, cfg.samples);
        ObjectiveEval eval;
        try {
            eval = objective.evaluate(samples, work, step);
            if (eval.point_grads.size() != samples.size())
                throw Error("objective returned " + std::to_string(eval.point_grads.size()) + " gradients for " +
                            std::to_string(samples.size()) + " points");
        } catch (const Error& e) {
            throw RefineError(step, e.what());
        }
        if (eval.value)
            out.objective_history.push_back(*eval.value);
        ControlGradients grad = route_to_control_points(work, samples, eval.point_grads);
        clip_gradient(grad, cfg.grad_clip);
        sgd_step(work, grad, cfg.lr);
        if (observer)
            observer(step, std::span<const CubicBezier3>(work).subspan(n_frozen));
    }

    for (std::size_t i = n_frozen; i < work.size(); ++i)
        out.graphic.curves.push_back(work[i]);
    return out;
}

}  // namespace vc3d
