#pragma once

#include "vc3d/bezier.hpp"
#include "vc3d/camera.hpp"

#include <array>
#include <string>
#include <vector>

namespace vc3d {

// Image-plane cubic with per-control-point weights. Coordinates are relative
// to the principal point, y down.
struct RationalBezier2 {
    std::array<Vec2, 4> q;
    std::array<double, 4> w{1, 1, 1, 1};
};

Vec2 eval_rational(const RationalBezier2& c, double t);

class NearPlaneError : public Error {
public:
    using Error::Error;
};

inline constexpr double kDefaultNearPlane = 1e-3;

// Perspective image of a 3D cubic: Q_k = f * (x_k, y_k) / z_k, w_k = z_k in
// camera coordinates. Throws NearPlaneError if any control point has
// z <= z_near.
RationalBezier2 project_curve(const CubicBezier3& curve, const Camera& camera, double z_near = kDefaultNearPlane);

// Direct perspective projection of a 3D point onto the image plane.
Vec2 project_point(const Vec3& world, const Camera& camera);

// Adaptive midpoint subdivision in parameter space. Every returned vertex lies
// on the curve; an interval is accepted once the curve points at 1/4, 1/2 and
// 3/4 of it are within tol of its chord.
std::vector<Vec2> flatten_rational(const RationalBezier2& curve, double tol);

struct RenderStyle {
    double stroke_width = 2.0;
    std::string stroke_color = "#000000";
    double opacity = 0.85;
    int width = 512;
    int height = 512;

    void validate() const;
};

// SVG 1.1 document with one <path> per curve that clears the near plane.
// Output bytes depend only on the inputs.
std::string emit_svg(const VectorGraphic3D& graphic, const Camera& camera, const RenderStyle& style,
                     double tol = 0.1);

inline constexpr double kViewElevation = 20.0;
inline constexpr double kViewRadius = 2.5;

std::vector<Camera> view_cameras(std::size_t n_views, double elevation_deg, double radius, const RenderStyle& style);

std::vector<std::string> render_views(const VectorGraphic3D& graphic, std::size_t n_views = 12,
                                      double elevation_deg = kViewElevation, double radius = kViewRadius,
                                      const RenderStyle& style = {}, double tol = 0.1);

}  // namespace vc3d
