#pragma once

#include "vc3d/mesh.hpp"
#include "vc3d/types.hpp"

#include <array>
#include <span>
#include <vector>

namespace vc3d {

enum class Provenance : std::uint8_t { Stage1, Stage2 };

const char* to_string(Provenance p);

struct CubicBezier3 {
    std::array<Vec3, 4> p{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    bool frozen = false;
    Provenance provenance = Provenance::Stage1;
};

// Cubic with P1, P2 at 1/3 and 2/3 of the segment a-b.
CubicBezier3 line_curve(const Vec3& a, const Vec3& b, Provenance provenance = Provenance::Stage1);
bool is_line_degenerate(const CubicBezier3& c, double tol = 1e-9);

std::array<double, 4> bernstein(double t);

// Throws vc3d::Error when t is outside [0, 1].
Vec3 eval_bezier(const CubicBezier3& c, double t);

struct VectorGraphic3D {
    std::vector<CubicBezier3> curves;
    NormalizeTransform transform;
};

// Uniform parameter samples of a curve set, with back-pointers to the curve
// and parameter of every point.
struct CurveSamples {
    std::vector<Vec3> points;
    std::vector<std::size_t> curve;
    std::vector<double> t;

    std::size_t size() const { return points.size(); }
};

// t_j = j / (s - 1), j = 0..s-1, for every curve in order.
CurveSamples sample_curves(std::span<const CubicBezier3> curves, std::size_t s);

// Arc length from a dense polyline approximation.
double arc_length(const CubicBezier3& c, std::size_t segments = 256);

}  // namespace vc3d
