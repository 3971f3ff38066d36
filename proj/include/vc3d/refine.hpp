#pragma once

#include "vc3d/curvefit.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vc3d {

struct CoverageReport {
    std::vector<bool> covered;           // per salient point
    std::vector<std::size_t> uncovered;  // indices of uncovered points
    double ratio = 0.0;
    double r_cover = 0.0;
};

// A salient point is covered iff its nearest curve sample is within r_cover.
// An empty curve cloud leaves every point uncovered.
CoverageReport coverage(std::span<const Vec3> salient, std::span<const Vec3> curve_pts, double r_cover);

struct ObjectiveEval {
    std::optional<double> value;  // some objectives only report gradients
    std::vector<Vec3> point_grads;  // one per combined sample; zero on frozen curves
};

// Scalar objective over the combined sample cloud of frozen and new curves.
// Gradients are taken w.r.t. the sample points; the driver chains them to the
// control points of unfrozen curves only.
class RefinementObjective {
public:
    virtual ~RefinementObjective() = default;
    virtual std::string name() const = 0;
    virtual ObjectiveEval evaluate(const CurveSamples& combined, std::span<const CubicBezier3> curves,
                                   std::size_t step) = 0;
};

// Chamfer loss between samples of the unfrozen curves and a fixed target
// (the uncovered salient points). Noise is redrawn each step.
std::unique_ptr<RefinementObjective> residual_chamfer_objective(std::vector<Vec3> uncovered_points,
                                                                const FitConfig& cfg,
                                                                double coverage_weight = 1.0);

struct SdsEndpoint {
    std::string url;
    std::string image_ref;
    double timeout_s = 120.0;
    double weight = 1.0;  // multiplies the returned gradients
};

// Delegates the gradient to an external scoring service:
//   request  {"points": [[x,y,z],...], "unfrozen_range": [start,end), "image_ref": str, "step": int}
//   response {"grads": [[gx,gy,gz],...]}  (one per point in unfrozen_range; optional "loss")
// Unfrozen curves must come after all frozen ones. The returned gradients are
// scaled by endpoint.weight.
std::unique_ptr<RefinementObjective> sds_objective(SdsEndpoint endpoint);

class RefineError : public Error {
public:
    RefineError(std::size_t step, const std::string& what)
        : Error("refinement failed at step " + std::to_string(step) + ": " + what), step_(step)
    {
    }
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

inline constexpr double kRefineJitter = 0.01;

// Re-clusters the uncovered points with tau halved, fits one curve per
// residual cluster and jitters it with seeded Gaussian noise. Line-shaped
// candidates keep their degree-elevated form (only the ends are jittered).
std::vector<CubicBezier3> init_refinement_curves(std::span<const std::size_t> uncovered,
                                                 const SalientPointCloud& cloud, const ClusterConfig& cfg,
                                                 double jitter_sigma = kRefineJitter);

struct RefineResult {
    VectorGraphic3D graphic;
    std::vector<double> objective_history;  // when the objective reports values
};

using RefineObserver = std::function<void(std::size_t step, std::span<const CubicBezier3> new_curves)>;

// Optimizes only new_curves for cfg.steps SGD steps; the curves already in
// graphic are treated as frozen and copied through untouched. observer, when
// set, sees the new curves after every step.
RefineResult refine(const VectorGraphic3D& graphic, std::vector<CubicBezier3> new_curves,
                    RefinementObjective& objective, const FitConfig& cfg, const RefineObserver& observer = {});

}  // namespace vc3d
