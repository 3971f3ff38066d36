#pragma once

#include "vc3d/camera.hpp"
#include "vc3d/types.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace vc3d {

using Face = std::array<std::uint32_t, 3>;

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::vector<Vec3> face_normals;  // unit length, one per face

    bool empty() const { return faces.empty(); }
};

// Faces whose area falls below this value, measured after scaling the mesh so
// its longest bounding-box side is 2, are dropped.
inline constexpr double kDegenerateArea = 1e-12;

struct LoadedMesh {
    Mesh mesh;
    std::size_t dropped_faces = 0;
};

enum class MeshFormat { Obj, Ply };

// Validates indices, drops degenerate faces and computes face normals.
LoadedMesh build_mesh(std::vector<Vec3> vertices, const std::vector<Face>& faces);

LoadedMesh parse_mesh(std::string_view text, MeshFormat format);
// Format chosen from the extension (.obj / .ply). Throws vc3d::Error with
// "unreadable file", "unsupported format" or "empty mesh".
LoadedMesh load_mesh(const std::filesystem::path& path);

// Maps source coordinates to normalized ones: (p - center) * scale.
struct NormalizeTransform {
    Vec3 center = Vec3::Zero();
    double scale = 1.0;

    Vec3 apply(const Vec3& p) const { return (p - center) * scale; }
    Vec3 inverse(const Vec3& p) const { return p / scale + center; }
};

struct NormalizedMesh {
    Mesh mesh;
    NormalizeTransform transform;
};

// Uniformly rescales so the bounding box is centered at the origin with its
// longest side equal to 2.
NormalizedMesh normalize_mesh(const Mesh& mesh);

struct EdgeAdjacency {
    std::vector<std::array<std::uint32_t, 2>> edges;  // (i, j) with i < j
    std::vector<std::vector<std::uint32_t>> edge_faces;

    std::size_t size() const { return edges.size(); }
    bool non_manifold(std::size_t e) const { return edge_faces[e].size() > 2; }
};

EdgeAdjacency build_edge_adjacency(const Mesh& mesh);

enum class EdgeLabel : std::uint8_t { Sharp, Boundary, NonManifold, Silhouette };

const char* to_string(EdgeLabel label);

// Sorted, duplicate-free set of edge indices, each with the label that first
// put it in the set.
struct EdgeSet {
    std::vector<std::size_t> edges;
    std::vector<EdgeLabel> labels;

    std::size_t size() const { return edges.size(); }
    bool empty() const { return edges.empty(); }
    bool contains(std::size_t edge) const;
    std::size_t count(EdgeLabel label) const;

    // Union; on overlap the label from *this wins.
    EdgeSet merged(const EdgeSet& other) const;
};

// Angle between the two face normals, in degrees. Only meaningful for edges
// with exactly two incident faces.
double normal_angle_deg(const Mesh& mesh, const EdgeAdjacency& adj, std::size_t edge);

// Two-face edges whose normal angle exceeds theta_sharp are Sharp; one-face
// edges are Boundary; edges with more than two faces are NonManifold.
EdgeSet detect_sharp_edges(const Mesh& mesh, const EdgeAdjacency& adj, double theta_sharp_deg);

// True when the face normal points towards the viewpoint.
bool is_front_facing(const Mesh& mesh, std::size_t face, const Vec3& viewpoint);

EdgeSet detect_silhouette_edges(const Mesh& mesh, const EdgeAdjacency& adj, const Camera& camera);

// Cameras used to find silhouettes on smooth parts of a normalized mesh.
inline constexpr double kSilhouetteRadius = 2.5;
std::vector<Camera> silhouette_cameras(std::size_t n_views);

EdgeSet extract_salient_edges(const Mesh& mesh, const EdgeAdjacency& adj, double theta_sharp_deg,
                              std::size_t n_views);

// Salient points. orientations and degenerate are empty until
// estimate_orientations fills them.
struct SalientPointCloud {
    std::vector<Vec3> points;
    std::vector<Vec3> orientations;
    std::vector<bool> degenerate;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool has_orientations() const { return orientations.size() == points.size(); }
};

// Points closer than this are treated as the same sample.
inline constexpr double kDedupDistance = 1e-9;

SalientPointCloud sample_salient_points(const Mesh& mesh, const EdgeAdjacency& adj, const EdgeSet& edges,
                                        double spacing);

}  // namespace vc3d
