#include "vc3d/bezier.hpp"

namespace vc3d {

const char* to_string(Provenance p)
{
    return p == Provenance::Stage1 ? "stage1" : "stage2";
}

CubicBezier3 line_curve(const Vec3& a, const Vec3& b, Provenance provenance)
{
    CubicBezier3 c;
    c.p = {a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b};
    c.provenance = provenance;
    return c;
}

bool is_line_degenerate(const CubicBezier3& c, double tol)
{
    const Vec3 d = c.p[3] - c.p[0];
    return (c.p[1] - (c.p[0] + d / 3.0)).norm() <= tol && (c.p[2] - (c.p[0] + 2.0 * d / 3.0)).norm() <= tol;
}

std::array<double, 4> bernstein(double t)
{
    const double u = 1.0 - t;
    return {u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t};
}

Vec3 eval_bezier(const CubicBezier3& c, double t)
{
    if (!(t >= 0.0 && t <= 1.0))
        throw Error("eval_bezier: t out of range");
    const auto b = bernstein(t);
    return b[0] * c.p[0] + b[1] * c.p[1] + b[2] * c.p[2] + b[3] * c.p[3];
}

CurveSamples sample_curves(std::span<const CubicBezier3> curves, std::size_t s)
{
    if (s < 2)
        throw Error("sample_curves: need at least 2 samples per curve");
    CurveSamples out;
    out.points.reserve(curves.size() * s);
    out.curve.reserve(curves.size() * s);
    out.t.reserve(curves.size() * s);
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = 0; j < s; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(s - 1);
            out.points.push_back(eval_bezier(curves[i], t));
            out.curve.push_back(i);
            out.t.push_back(t);
        }
    }
    return out;
}

double arc_length(const CubicBezier3& c, std::size_t segments)
{
    double len = 0.0;
    Vec3 prev = c.p[0];
    for (std::size_t i = 1; i <= segments; ++i) {
        const Vec3 cur = eval_bezier(c, static_cast<double>(i) / static_cast<double>(segments));
        len += (cur - prev).norm();
        prev = cur;
    }
    return len;
}

}  // namespace vc3d
