#pragma once

#include "vc3d/bezier.hpp"
#include "vc3d/clustering.hpp"
#include "vc3d/kdtree.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace vc3d {

struct FitConfig {
    std::size_t samples = 64;  // s, per curve
    double lambda = 1.0;
    double noise_sigma = 0.005;
    double lr = 5e-3;
    std::size_t steps = 100;
    std::uint64_t rng_seed = 0;
    double grad_clip = 10.0;  // global L2 norm; <= 0 disables

    void validate() const;
};

// Chamfer loss between a curve sample cloud and the salient cloud:
//   lambda * mean_p min_q |p-q|^2  +  coverage_weight * mean_q min_p |p-q|^2
// Nearest neighbors are exact. Throws on an empty cloud.
double chamfer_loss(std::span<const Vec3> curve_pts, std::span<const Vec3> salient, double lambda,
                    double coverage_weight = 1.0);

struct ChamferEval {
    double loss = 0.0;
    std::vector<Vec3> grad;  // d loss / d curve_pts[i]
};

// Loss and its gradient w.r.t. each curve point, with the nearest-neighbor
// correspondences held fixed at their current values. salient_tree, when
// given, must be built over `salient`.
ChamferEval chamfer_value_and_grad(std::span<const Vec3> curve_pts, std::span<const Vec3> salient,
                                   double lambda, double coverage_weight = 1.0,
                                   const KdTree* salient_tree = nullptr);

// Independent zero-mean Gaussian offset of std-dev sigma on every coordinate.
std::vector<Vec3> add_noise(std::span<const Vec3> pts, double sigma, std::uint64_t seed);

// Seed of the noise draw used at a given optimization step.
std::uint64_t step_seed(std::uint64_t base, std::size_t step);

using ControlGradients = std::vector<std::array<Vec3, 4>>;

// Chain rule through the Bernstein weights: dL/dP_k += b_k(t_j) * dL/dB(t_j).
// Frozen curves receive exact zeros.
ControlGradients route_to_control_points(std::span<const CubicBezier3> curves, const CurveSamples& samples,
                                         std::span<const Vec3> point_grads);

struct CurveGradient {
    double loss = 0.0;  // loss on the noisy samples the gradient was taken at
    ControlGradients grad;
};

// Gradient of chamfer_loss(add_noise(sample_curves(curves))) w.r.t. every
// unfrozen control point. The noise draw is a constant offset.
CurveGradient chamfer_gradient(std::span<const CubicBezier3> curves, std::span<const Vec3> salient,
                               const FitConfig& cfg, std::uint64_t noise_seed,
                               const KdTree* salient_tree = nullptr);

// Scales the whole gradient down to max_norm if its L2 norm exceeds it.
// Returns the norm before clipping.
double clip_gradient(ControlGradients& grad, double max_norm);

// Plain SGD step on the unfrozen curves.
void sgd_step(std::span<CubicBezier3> curves, const ControlGradients& grad, double lr);

// One-sided Chamfer: mean squared distance from each point to the nearest of
// 256 uniform samples of the curve.
double one_sided_error(std::span<const Vec3> points, const CubicBezier3& curve);

struct InitCandidates {
    CubicBezier3 line;   // least-squares segment, degree-elevated
    CubicBezier3 curve;  // ends at first/last point, P1/P2 at the 1/3, 2/3 arc-length points
    double line_error = 0.0;
    double curve_error = 0.0;
    // Points on one line up to rounding. The line then wins outright: the
    // curve candidate is the same segment with uneven parameter spacing, and
    // only sampling noise separates the two errors.
    bool collinear = false;
};

// Points are taken in cluster order. Throws when fewer than 2 points are given
// or they all coincide. init_curve_from_points keeps the candidate with the
// smaller error; ties and collinear input go to the line.
InitCandidates init_candidates(std::span<const Vec3> ordered_points);
CubicBezier3 init_curve_from_points(std::span<const Vec3> ordered_points);
CubicBezier3 init_curves_from_cluster(const Cluster& cluster, const SalientPointCloud& cloud);

struct FitResult {
    VectorGraphic3D graphic;
    std::vector<double> loss_history;  // noise-free loss, index 0 = initial curves
    double initial_loss = 0.0;
    double final_loss = 0.0;  // noise-free loss of the returned curves
};

// Runs cfg.steps SGD iterations over all unfrozen curves jointly against the
// full salient cloud. The returned curves are the iterate with the lowest
// noise-free loss, so final_loss <= initial_loss.
FitResult optimize_curves(std::vector<CubicBezier3> curves, std::span<const Vec3> salient, const FitConfig& cfg);

FitResult fit_stage1(const std::vector<Cluster>& clusters, const SalientPointCloud& cloud, const FitConfig& cfg);

}  // namespace vc3d
