#include "vc3d/curvefit.hpp"

#include <cmath>
#include <optional>
#include <random>

namespace vc3d {

void FitConfig::validate() const
{
    if (samples < 2)
        throw Error("samples per curve must be at least 2");
    if (!(lambda >= 0))
        throw Error("lambda must be non-negative");
    if (!(noise_sigma >= 0))
        throw Error("noise_sigma must be non-negative");
    if (!(lr > 0))
        throw Error("learning rate must be positive");
}

ChamferEval chamfer_value_and_grad(std::span<const Vec3> curve_pts, std::span<const Vec3> salient, double lambda,
                                   double coverage_weight, const KdTree* salient_tree)
{
    if (curve_pts.empty() || salient.empty())
        throw Error("chamfer: empty cloud");

    std::optional<KdTree> own_tree;
    if (!salient_tree) {
        own_tree.emplace(salient);
        salient_tree = &*own_tree;
    }

    ChamferEval out;
    out.grad.assign(curve_pts.size(), Vec3::Zero());
    const double wc = lambda / static_cast<double>(curve_pts.size());
    const double ws = coverage_weight / static_cast<double>(salient.size());

    double fit = 0.0;
    if (lambda != 0.0) {
        for (std::size_t i = 0; i < curve_pts.size(); ++i) {
            const Neighbor nn = salient_tree->nearest(curve_pts[i]);
            fit += nn.dist2;
            out.grad[i] += 2.0 * wc * (curve_pts[i] - salient[nn.index]);
        }
    }

    double cover = 0.0;
    if (coverage_weight != 0.0) {
        const KdTree curve_tree(curve_pts);
        for (std::size_t j = 0; j < salient.size(); ++j) {
            const Neighbor nn = curve_tree.nearest(salient[j]);
            cover += nn.dist2;
            out.grad[nn.index] += 2.0 * ws * (curve_pts[nn.index] - salient[j]);
        }
    }
    out.loss = wc * fit + ws * cover;
    return out;
}

double chamfer_loss(std::span<const Vec3> curve_pts, std::span<const Vec3> salient, double lambda,
                    double coverage_weight)
{
    return chamfer_value_and_grad(curve_pts, salient, lambda, coverage_weight).loss;
}

std::vector<Vec3> add_noise(std::span<const Vec3> pts, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0))
        throw Error("noise sigma must be non-negative");
    std::vector<Vec3> out(pts.begin(), pts.end());
    if (sigma == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (Vec3& p : out)
        for (int k = 0; k < 3; ++k)
            p[k] += gauss(rng);
    return out;
}

std::uint64_t step_seed(std::uint64_t base, std::size_t step)
{
    // splitmix64 over (base, step)
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(step) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

ControlGradients route_to_control_points(std::span<const CubicBezier3> curves, const CurveSamples& samples,
                                         std::span<const Vec3> point_grads)
{
    if (point_grads.size() != samples.size())
        throw Error("gradient routing: size mismatch");
    ControlGradients grad(curves.size(), {Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()});
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const std::size_t c = samples.curve[j];
        if (curves[c].frozen)
            continue;
        const auto b = bernstein(samples.t[j]);
        for (int k = 0; k < 4; ++k)
            grad[c][k] += b[k] * point_grads[j];
    }
    return grad;
}

CurveGradient chamfer_gradient(std::span<const CubicBezier3> curves, std::span<const Vec3> salient,
                               const FitConfig& cfg, std::uint64_t noise_seed, const KdTree* salient_tree)
{
    if (curves.empty())
        throw Error("chamfer_gradient: no curves");
    const CurveSamples samples = sample_curves(curves, cfg.samples);
    const auto noisy = add_noise(samples.points, cfg.noise_sigma, noise_seed);
    const ChamferEval eval = chamfer_value_and_grad(noisy, salient, cfg.lambda, 1.0, salient_tree);
    return {eval.loss, route_to_control_points(curves, samples, eval.grad)};
}

double clip_gradient(ControlGradients& grad, double max_norm)
{
    double sq = 0.0;
    for (const auto& g : grad)
        for (const Vec3& v : g)
            sq += v.squaredNorm();
    const double norm = std::sqrt(sq);
    if (max_norm > 0 && norm > max_norm) {
        const double s = max_norm / norm;
        for (auto& g : grad)
            for (Vec3& v : g)
                v *= s;
    }
    return norm;
}

void sgd_step(std::span<CubicBezier3> curves, const ControlGradients& grad, double lr)
{
    for (std::size_t i = 0; i < curves.size(); ++i) {
        if (curves[i].frozen)
            continue;
        for (int k = 0; k < 4; ++k)
            curves[i].p[k] -= lr * grad[i][k];
    }
}

}  // namespace vc3d
