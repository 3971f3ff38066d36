#pragma once

#include "vc3d/bezier.hpp"
#include "vc3d/mesh.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

using vc3d::Mesh;
using vc3d::Vec3;

// Axis-aligned box, 8 vertices and 12 outward-facing triangles.
Mesh box(const Vec3& lo, const Vec3& hi);
inline Mesh cube() { return box(Vec3(-1, -1, -1), Vec3(1, 1, 1)); }
Mesh icosphere(int subdivisions);
Mesh torus(int major_segments, int minor_segments, double major_radius, double minor_radius);
Mesh single_triangle();
Mesh two_triangles();  // unit quad in z=0 split along a diagonal

std::string to_obj(const Mesh& mesh);
void write_obj(const Mesh& mesh, const std::filesystem::path& path);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

// Points every `spacing` along a segment, both ends included.
std::vector<Vec3> segment_points(const Vec3& a, const Vec3& b, double spacing);

// Branched "coral" target: a trunk with two limbs and five short terminal
// twigs, sampled every `spacing`. twig_tips holds the far end of each twig.
struct Coral {
    std::vector<Vec3> points;
    std::vector<Vec3> twig_tips;
};
Coral coral(double spacing = 0.005);

vc3d::CubicBezier3 random_curve(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0);

// Corners of the [-1,1]^3 cube.
std::vector<Vec3> cube_corners();

}  // namespace fixtures
