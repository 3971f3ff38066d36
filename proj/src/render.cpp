#include "vc3d/render.hpp"

#include <cmath>
#include <cstdio>
#include <functional>

namespace vc3d {

Vec2 eval_rational(const RationalBezier2& c, double t)
{
    const auto b = bernstein(t);
    Vec2 num = Vec2::Zero();
    double den = 0.0;
    for (int k = 0; k < 4; ++k) {
        num += b[k] * c.w[k] * c.q[k];
        den += b[k] * c.w[k];
    }
    return num / den;
}

RationalBezier2 project_curve(const CubicBezier3& curve, const Camera& camera, double z_near)
{
    RationalBezier2 out;
    const Eigen::Matrix3d r = camera.rotation();
    for (int k = 0; k < 4; ++k) {
        const Vec3 c = r * (curve.p[k] - camera.position);
        if (!(c.z() > z_near))
            throw NearPlaneError("curve crosses near plane");
        out.q[k] = camera.focal_length * Vec2(c.x() / c.z(), c.y() / c.z());
        out.w[k] = c.z();
    }
    return out;
}

Vec2 project_point(const Vec3& world, const Camera& camera)
{
    const Vec3 c = world_to_camera(camera, world);
    return camera.focal_length * Vec2(c.x() / c.z(), c.y() / c.z());
}

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b)
{
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0)
        return (p - a).norm();
    const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + s * ab)).norm();
}

}  // namespace

std::vector<Vec2> flatten_rational(const RationalBezier2& curve, double tol)
{
    if (!(tol > 0))
        throw Error("flatten tolerance must be positive");
    constexpr int kMaxDepth = 18;
    std::vector<Vec2> out{eval_rational(curve, 0.0)};

    std::function<void(double, const Vec2&, double, const Vec2&, int)> rec =
        [&](double t0, const Vec2& a, double t1, const Vec2& b, int depth) {
            const double tm = 0.5 * (t0 + t1);
            const Vec2 m = eval_rational(curve, tm);
            double dev = segment_distance(m, a, b);
            dev = std::max(dev, segment_distance(eval_rational(curve, 0.5 * (t0 + tm)), a, b));
            dev = std::max(dev, segment_distance(eval_rational(curve, 0.5 * (tm + t1)), a, b));
            if (dev < tol || depth >= kMaxDepth) {
                out.push_back(b);
                return;
            }
            rec(t0, a, tm, m, depth + 1);
            rec(tm, m, t1, b, depth + 1);
        };
    rec(0.0, out.front(), 1.0, eval_rational(curve, 1.0), 0);
    return out;
}

void RenderStyle::validate() const
{
    if (!(stroke_width > 0))
        throw Error("stroke width must be positive");
    if (!(opacity > 0 && opacity <= 1))
        throw Error("opacity must lie in (0, 1]");
    if (width <= 0 || height <= 0)
        throw Error("canvas size must be positive");
}

namespace {

// Fixed 3-decimal formatting; "-0.000" is folded into "0.000".
std::string fmt3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000")
        s = "0.000";
    return s;
}

}  // namespace

std::string emit_svg(const VectorGraphic3D& graphic, const Camera& camera, const RenderStyle& style, double tol)
{
    camera.validate();
    style.validate();
    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(style.width) +
           "\" height=\"" + std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
           std::to_string(style.height) + "\">\n";
    const std::string attrs = " fill=\"none\" stroke=\"" + style.stroke_color + "\" stroke-width=\"" +
                              fmt3(style.stroke_width) + "\" stroke-opacity=\"" + fmt3(style.opacity) +
                              "\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";

    const Vec2 center = camera.principal_point;
    for (std::size_t i = 0; i < graphic.curves.size(); ++i) {
        RationalBezier2 rc;
        try {
            rc = project_curve(graphic.curves[i], camera);
        } catch (const NearPlaneError&) {
            svg += "<!-- skipped curve " + std::to_string(i) + ": crosses near plane -->\n";
            continue;
        }
        const auto poly = flatten_rational(rc, tol);
        std::string d;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Vec2 px = poly[k] + center;
            d += (k == 0 ? "M" : " L");
            d += fmt3(px.x()) + " " + fmt3(px.y());
        }
        svg += "<path d=\"" + d + "\"" + attrs;
    }
    svg += "</svg>\n";
    return svg;
}

std::vector<Camera> view_cameras(std::size_t n_views, double elevation_deg, double radius, const RenderStyle& style)
{
    if (n_views < 1)
        throw Error("n_views must be at least 1");
    std::vector<Camera> cams;
    for (std::size_t k = 0; k < n_views; ++k)
        cams.push_back(orbit_camera(360.0 * static_cast<double>(k) / static_cast<double>(n_views), elevation_deg,
                                    radius, style.width, style.height));
    return cams;
}

std::vector<std::string> render_views(const VectorGraphic3D& graphic, std::size_t n_views, double elevation_deg,
                                      double radius, const RenderStyle& style, double tol)
{
    std::vector<std::string> out;
    for (const Camera& cam : view_cameras(n_views, elevation_deg, radius, style))
        out.push_back(emit_svg(graphic, cam, style, tol));
    return out;
}

}  // namespace vc3d
