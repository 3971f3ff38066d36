#include "vc3d/curvefit.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace vc3d {

double one_sided_error(std::span<const Vec3> points, const CubicBezier3& curve)
{
    if (points.empty())
        return 0.0;
    const CubicBezier3 one[] = {curve};
    const CurveSamples dense = sample_curves(one, 256);
    const KdTree tree(dense.points);
    double sum = 0.0;
    for (const Vec3& p : points)
        sum += tree.nearest(p).dist2;
    return sum / static_cast<double>(points.size());
}

InitCandidates init_candidates(std::span<const Vec3> pts)
{
    if (pts.size() < 2)
        throw Error("cluster needs at least 2 points");

    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : pts)
        mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Vec3& p : pts)
        cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (!(eig.eigenvalues()[2] > 0.0))
        throw Error("degenerate cluster: all points coincide");

    // Least-squares line, oriented so it runs from the first point to the last.
    Vec3 dir = eig.eigenvectors().col(2).normalized();
    if ((pts.back() - pts.front()).dot(dir) < 0)
        dir = -dir;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const Vec3& p : pts) {
        const double s = (p - mean).dot(dir);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }

    InitCandidates out;
    out.line = line_curve(mean + lo * dir, mean + hi * dir);
    out.collinear = eig.eigenvalues()[1] <= 1e-24 * eig.eigenvalues()[2];

    std::vector<double> arc(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        arc[i] = arc[i - 1] + (pts[i] - pts[i - 1]).norm();
    auto nearest_arc = [&](double target) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < arc.size(); ++i)
            if (std::abs(arc[i] - target) < std::abs(arc[best] - target))
                best = i;
        return pts[best];
    };
    out.curve.p = {pts.front(), nearest_arc(arc.back() / 3.0), nearest_arc(2.0 * arc.back() / 3.0), pts.back()};

    out.line_error = one_sided_error(pts, out.line);
    out.curve_error = one_sided_error(pts, out.curve);
    return out;
}

CubicBezier3 init_curve_from_points(std::span<const Vec3> ordered_points)
{
    const InitCandidates c = init_candidates(ordered_points);
    return !c.collinear && c.curve_error < c.line_error ? c.curve : c.line;
}

CubicBezier3 init_curves_from_cluster(const Cluster& cluster, const SalientPointCloud& cloud)
{
    std::vector<Vec3> pts;
    pts.reserve(cluster.size());
    for (std::size_t m : cluster.members)
        pts.push_back(cloud.points[m]);
    return init_curve_from_points(pts);
}

FitResult optimize_curves(std::vector<CubicBezier3> curves, std::span<const Vec3> salient, const FitConfig& cfg)
{
    cfg.validate();
    if (curves.empty())
        throw Error("no curves to optimize");
    const KdTree salient_tree(salient);
    auto clean_loss = [&](const std::vector<CubicBezier3>& cs) {
        const CurveSamples s = sample_curves(cs, cfg.samples);
        return chamfer_value_and_grad(s.points, salient, cfg.lambda, 1.0, &salient_tree).loss;
    };

    FitResult out;
    out.initial_loss = clean_loss(curves);
    out.loss_history.push_back(out.initial_loss);
    std::vector<CubicBezier3> best = curves;
    double best_loss = out.initial_loss;

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        CurveGradient g = chamfer_gradient(curves, salient, cfg, step_seed(cfg.rng_seed, step), &salient_tree);
        clip_gradient(g.grad, cfg.grad_clip);
        sgd_step(curves, g.grad, cfg.lr);
        const double loss = clean_loss(curves);
        out.loss_history.push_back(loss);
        if (loss < best_loss) {
            best_loss = loss;
            best = curves;
        }
    }
    out.graphic.curves = std::move(best);
    out.final_loss = best_loss;
    return out;
}

FitResult fit_stage1(const std::vector<Cluster>& clusters, const SalientPointCloud& cloud, const FitConfig& cfg)
{
    if (clusters.empty())
        throw Error("fit_stage1: no clusters");
    std::vector<CubicBezier3> curves;
    curves.reserve(clusters.size());
    for (const Cluster& c : clusters) {
        CubicBezier3 curve = init_curves_from_cluster(c, cloud);
        curve.provenance = Provenance::Stage1;
        curves.push_back(curve);
    }
    return optimize_curves(std::move(curves), cloud.points, cfg);
}

}  // namespace vc3d
