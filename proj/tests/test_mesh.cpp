#include "fixtures.hpp"
#include "vc3d/camera.hpp"
#include "vc3d/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>

using namespace vc3d;

namespace {

Vec3 centroid(const Mesh& m, std::size_t f)
{
    return (m.vertices[m.faces[f][0]] + m.vertices[m.faces[f][1]] + m.vertices[m.faces[f][2]]) / 3.0;
}

// Independent face normal from the raw vertex positions.
Vec3 raw_normal(const Mesh& m, std::size_t f)
{
    const Vec3& a = m.vertices[m.faces[f][0]];
    const Vec3& b = m.vertices[m.faces[f][1]];
    const Vec3& c = m.vertices[m.faces[f][2]];
    return (b - a).cross(c - a).normalized();
}

double max_normal_angle(const Mesh& m, const EdgeAdjacency& adj)
{
    double worst = 0.0;
    for (const auto& faces : adj.edge_faces) {
        if (faces.size() != 2)
            continue;
        const double c = std::clamp(raw_normal(m, faces[0]).dot(raw_normal(m, faces[1])), -1.0, 1.0);
        worst = std::max(worst, rad_to_deg(std::acos(c)));
    }
    return worst;
}

// Brute-force silhouette test straight from the definition.
std::vector<std::size_t> oracle_silhouette(const Mesh& m, const EdgeAdjacency& adj, const Vec3& eye)
{
    std::vector<std::size_t> out;
    for (std::size_t e = 0; e < adj.size(); ++e) {
        const auto& f = adj.edge_faces[e];
        if (f.size() != 2)
            continue;
        const bool a = raw_normal(m, f[0]).dot(eye - centroid(m, f[0])) > 0;
        const bool b = raw_normal(m, f[1]).dot(eye - centroid(m, f[1])) > 0;
        if (a != b)
            out.push_back(e);
    }
    return out;
}

bool every_vertex_even(const EdgeAdjacency& adj, const EdgeSet& set)
{
    std::map<std::uint32_t, int> degree;
    for (std::size_t e : set.edges) {
        ++degree[adj.edges[e][0]];
        ++degree[adj.edges[e][1]];
    }
    for (const auto& [v, d] : degree)
        if (d % 2 != 0)
            return false;
    return true;
}

Mesh normalized_cube() { return normalize_mesh(fixtures::cube()).mesh; }

}  // namespace

TEST_CASE("cube loads with 12 unit axis normals")
{
    const auto dir = fixtures::temp_dir("mesh_load");
    fixtures::write_obj(fixtures::cube(), dir / "cube.obj");
    const auto loaded = load_mesh(dir / "cube.obj");
    CHECK(loaded.dropped_faces == 0);
    REQUIRE(loaded.mesh.faces.size() == 12);
    for (std::size_t f = 0; f < 12; ++f) {
        const Vec3& n = loaded.mesh.face_normals[f];
        CHECK(std::abs(n.norm() - 1.0) < 1e-9);
        CHECK(n.cwiseAbs().maxCoeff() == doctest::Approx(1.0));
        // Outward: points away from the cube center.
        CHECK(n.dot(centroid(loaded.mesh, f)) > 0);
    }
}

TEST_CASE("zero-area triangle is dropped and counted")
{
    const std::string obj = "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\nf 1 2 3\nf 1 2 4\n";
    const auto loaded = parse_mesh(obj, MeshFormat::Obj);
    CHECK(loaded.dropped_faces == 1);
    CHECK(loaded.mesh.faces.size() == 1);
}

TEST_CASE("load errors")
{
    const auto dir = fixtures::temp_dir("mesh_errors");
    CHECK_THROWS_WITH(load_mesh(dir / "missing.obj"), doctest::Contains("unreadable file"));
    std::ofstream(dir / "mesh.stl") << "solid x\n";
    CHECK_THROWS_WITH(load_mesh(dir / "mesh.stl"), doctest::Contains("unsupported format"));
    std::ofstream(dir / "empty.obj") << "# nothing\n";
    CHECK_THROWS_WITH(load_mesh(dir / "empty.obj"), doctest::Contains("empty mesh"));
    std::ofstream(dir / "bad.obj") << "v 0 0 0\nf 1 2 3\n";
    CHECK_THROWS(load_mesh(dir / "bad.obj"));
}

TEST_CASE("OBJ polygons, negative and slashed indices")
{
    const std::string obj = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf -4/1/1 -3/2/1 -2/3/1 -1/4/1\n";
    const auto loaded = parse_mesh(obj, MeshFormat::Obj);
    REQUIRE(loaded.mesh.faces.size() == 2);
    CHECK(loaded.mesh.face_normals[0].isApprox(Vec3(0, 0, 1)));
}

TEST_CASE("ASCII PLY")
{
    const std::string ply =
        "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
        "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
    const auto loaded = parse_mesh(ply, MeshFormat::Ply);
    CHECK(loaded.mesh.faces.size() == 1);
    CHECK_THROWS_WITH(parse_mesh("ply\nformat binary_little_endian 1.0\nend_header\n", MeshFormat::Ply),
                      doctest::Contains("unsupported format"));
}

TEST_CASE("normalize_mesh")
{
    SUBCASE("cube (0,0,0)-(10,10,10) maps to [-1,1]^3")
    {
        const auto n = normalize_mesh(fixtures::box(Vec3(0, 0, 0), Vec3(10, 10, 10)));
        for (const Vec3& p : n.mesh.vertices)
            CHECK(p.cwiseAbs().isApprox(Vec3(1, 1, 1)));
        CHECK(n.transform.scale == doctest::Approx(0.2));
        CHECK(n.transform.inverse(n.mesh.vertices[7]).isApprox(Vec3(10, 10, 10)));
    }
    SUBCASE("idempotent")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-5, 7);
        auto m = fixtures::icosphere(1);
        for (Vec3& p : m.vertices)
            p = p.cwiseProduct(Vec3(3, 1, 0.5)) + Vec3(u(rng), u(rng), u(rng));
        const auto once = normalize_mesh(m).mesh;
        const auto twice = normalize_mesh(once).mesh;
        for (std::size_t i = 0; i < once.vertices.size(); ++i)
            CHECK((once.vertices[i] - twice.vertices[i]).norm() < 1e-12);
    }
    SUBCASE("4x2x2 box keeps proportions")
    {
        const auto n = normalize_mesh(fixtures::box(Vec3(0, 0, 0), Vec3(4, 2, 2))).mesh;
        Vec3 lo = n.vertices[0], hi = n.vertices[0];
        for (const Vec3& p : n.vertices) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        CHECK((hi - lo).isApprox(Vec3(2, 1, 1)));
        CHECK((hi + lo).norm() < 1e-12);
    }
}

TEST_CASE("edge adjacency counts")
{
    const auto cube = build_edge_adjacency(fixtures::cube());
    CHECK(cube.size() == 18);
    for (const auto& f : cube.edge_faces)
        CHECK(f.size() == 2);
    const auto tri = build_edge_adjacency(fixtures::single_triangle());
    CHECK(tri.size() == 3);
    for (const auto& f : tri.edge_faces)
        CHECK(f.size() == 1);
    const auto two = build_edge_adjacency(fixtures::two_triangles());
    CHECK(two.size() == 5);
    std::size_t shared = 0;
    for (std::size_t e = 0; e < two.size(); ++e) {
        CHECK(two.edges[e][0] < two.edges[e][1]);
        shared += two.edge_faces[e].size() == 2;
    }
    CHECK(shared == 1);
}

TEST_CASE("non-manifold edges are flagged and salient")
{
    const auto m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}}, {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}})
                       .mesh;
    const auto adj = build_edge_adjacency(m);
    const auto sharp = detect_sharp_edges(m, adj, 30.0);
    CHECK(sharp.count(EdgeLabel::NonManifold) == 1);
}

TEST_CASE("sharp edges")
{
    SUBCASE("cube: exactly the 12 geometric edges")
    {
        const Mesh m = normalized_cube();
        const auto adj = build_edge_adjacency(m);
        const auto sharp = detect_sharp_edges(m, adj, 30.0);
        CHECK(sharp.count(EdgeLabel::Sharp) == 12);
        CHECK(sharp.size() == 12);
        for (std::size_t e : sharp.edges) {
            const Vec3 d = m.vertices[adj.edges[e][1]] - m.vertices[adj.edges[e][0]];
            CHECK(d.norm() == doctest::Approx(2.0));  // face diagonals are 2*sqrt(2)
            CHECK(normal_angle_deg(m, adj, e) == doctest::Approx(90.0));
        }
    }
    SUBCASE("flat quad: no sharp, 4 boundary")
    {
        const Mesh m = fixtures::two_triangles();
        const auto sharp = detect_sharp_edges(m, build_edge_adjacency(m), 30.0);
        CHECK(sharp.count(EdgeLabel::Sharp) == 0);
        CHECK(sharp.count(EdgeLabel::Boundary) == 4);
    }
    SUBCASE("icosphere: none, confirmed by brute-force max normal angle")
    {
        const Mesh m = fixtures::icosphere(2);
        const auto adj = build_edge_adjacency(m);
        REQUIRE(max_normal_angle(m, adj) < 30.0);
        CHECK(detect_sharp_edges(m, adj, 30.0).empty());
    }
    SUBCASE("threshold bounds")
    {
        const Mesh m = fixtures::cube();
        const auto adj = build_edge_adjacency(m);
        CHECK_THROWS(detect_sharp_edges(m, adj, 0.0));
        CHECK_THROWS(detect_sharp_edges(m, adj, 180.0));
    }
}

TEST_CASE("sharpness does not depend on face order")
{
    Mesh m = fixtures::icosphere(1);
    const auto before = detect_sharp_edges(m, build_edge_adjacency(m), 15.0);
    std::reverse(m.faces.begin(), m.faces.end());
    std::reverse(m.face_normals.begin(), m.face_normals.end());
    const auto adj = build_edge_adjacency(m);
    const auto after = detect_sharp_edges(m, adj, 15.0);
    CHECK(before.size() == after.size());
    CHECK(before.size() > 0);
}

TEST_CASE("silhouettes")
{
    SUBCASE("cube from (0,0,5) matches brute-force sign test")
    {
        const Mesh m = normalized_cube();
        const auto adj = build_edge_adjacency(m);
        Camera cam;
        cam.position = Vec3(0, 0, 5);
        const auto sil = detect_silhouette_edges(m, adj, cam);
        CHECK(sil.edges == oracle_silhouette(m, adj, cam.position));
        CHECK(sil.size() == 4);
        for (std::size_t e : sil.edges) {
            CHECK(m.vertices[adj.edges[e][0]].z() == doctest::Approx(1.0));
            CHECK(m.vertices[adj.edges[e][1]].z() == doctest::Approx(1.0));
        }
    }
    SUBCASE("icosphere: non-empty closed loops, one front and one back face each")
    {
        const Mesh m = fixtures::icosphere(2);
        const auto adj = build_edge_adjacency(m);
        for (const Camera& cam : silhouette_cameras(7)) {
            const auto sil = detect_silhouette_edges(m, adj, cam);
            CHECK(!sil.empty());
            CHECK(sil.edges == oracle_silhouette(m, adj, cam.position));
            CHECK(every_vertex_even(adj, sil));
            for (std::size_t e : sil.edges) {
                const auto& f = adj.edge_faces[e];
                CHECK(is_front_facing(m, f[0], cam.position) != is_front_facing(m, f[1], cam.position));
            }
        }
    }
    SUBCASE("single triangle: empty")
    {
        const Mesh m = fixtures::single_triangle();
        Camera cam;
        cam.position = Vec3(0.2, 0.3, 4);
        CHECK(detect_silhouette_edges(m, build_edge_adjacency(m), cam).empty());
    }
    SUBCASE("camera roll leaves the set unchanged")
    {
        const Mesh m = fixtures::icosphere(2);
        const auto adj = build_edge_adjacency(m);
        Camera cam;
        cam.position = Vec3(1.5, 0.7, 2.0);
        const auto ref = detect_silhouette_edges(m, adj, cam);
        for (const Vec3& up : {Vec3(1, 0, 0), Vec3(0.3, -1, 0.2), Vec3(0, 0, 1)}) {
            cam.up = up.normalized();
            CHECK(detect_silhouette_edges(m, adj, cam).edges == ref.edges);
        }
    }
}

TEST_CASE("extract_salient_edges")
{
    const Mesh sphere = fixtures::icosphere(2);
    const auto sadj = build_edge_adjacency(sphere);
    const auto sal = extract_salient_edges(sphere, sadj, 30.0, 16);
    std::vector<std::size_t> oracle;
    for (const Camera& cam : silhouette_cameras(16))
        for (std::size_t e : oracle_silhouette(sphere, sadj, cam.position))
            oracle.push_back(e);
    std::sort(oracle.begin(), oracle.end());
    oracle.erase(std::unique(oracle.begin(), oracle.end()), oracle.end());
    CHECK(!sal.empty());
    CHECK(sal.edges == oracle);
    CHECK(sal.count(EdgeLabel::Silhouette) == sal.size());

    const Mesh cube = normalized_cube();
    const auto cadj = build_edge_adjacency(cube);
    CHECK_THROWS(extract_salient_edges(cube, cadj, 30.0, 0));
    const auto all = extract_salient_edges(cube, cadj, 30.0, 16);
    for (std::size_t e : detect_sharp_edges(cube, cadj, 30.0).edges)
        CHECK(all.contains(e));

    const auto cams = silhouette_cameras(16);
    for (const Camera& c : cams) {
        CHECK(c.position.norm() == doctest::Approx(kSilhouetteRadius));
        CHECK(c.position.y() == doctest::Approx(0.0));
    }
}

TEST_CASE("salient point sampling")
{
    SUBCASE("edge of length 1, spacing 0.25 gives 5 points")
    {
        const Mesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}).mesh;
        const auto adj = build_edge_adjacency(m);
        EdgeSet one;
        for (std::size_t e = 0; e < adj.size(); ++e)
            if (adj.edges[e] == std::array<std::uint32_t, 2>{0, 1}) {
                one.edges.push_back(e);
                one.labels.push_back(EdgeLabel::Boundary);
            }
        const auto cloud = sample_salient_points(m, adj, one, 0.25);
        REQUIRE(cloud.size() == 5);
        for (int i = 0; i < 5; ++i) {
            bool found = false;
            for (const Vec3& p : cloud.points)
                found |= (p - Vec3(0.25 * i, 0, 0)).norm() < 1e-12;
            CHECK(found);
        }
        CHECK(!cloud.has_orientations());
    }
    SUBCASE("shared endpoint appears once")
    {
        const Mesh m = build_mesh({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}).mesh;
        const auto adj = build_edge_adjacency(m);
        const auto all = detect_sharp_edges(m, adj, 30.0);  // three boundary edges
        const auto cloud = sample_salient_points(m, adj, all, 0.25);
        // 5 + 5 points on the legs, ceil(sqrt2/0.25)+1 = 7 on the hypotenuse, minus 3 corners.
        CHECK(cloud.size() == 5 + 5 + 7 - 3);
    }
    SUBCASE("cube edges at spacing 0.05 match an independent dedup count")
    {
        const Mesh m = normalized_cube();
        const auto adj = build_edge_adjacency(m);
        const auto sharp = detect_sharp_edges(m, adj, 30.0);
        const auto cloud = sample_salient_points(m, adj, sharp, 0.05);
        std::vector<Vec3> raw;
        for (std::size_t e : sharp.edges) {
            const Vec3 a = m.vertices[adj.edges[e][0]], b = m.vertices[adj.edges[e][1]];
            for (int i = 0; i <= 40; ++i)
                raw.push_back(a + (b - a) * (i / 40.0));
        }
        std::vector<Vec3> unique;
        for (const Vec3& p : raw) {
            bool dup = false;
            for (const Vec3& u : unique)
                dup |= (u - p).norm() <= 1e-9;
            if (!dup)
                unique.push_back(p);
        }
        CHECK(unique.size() == 12 * 41 - 16);
        CHECK(cloud.size() == unique.size());
    }
    SUBCASE("samples lie on their edges and are at most spacing apart")
    {
        const Mesh m = normalize_mesh(fixtures::torus(24, 12, 1.0, 0.35)).mesh;
        const auto adj = build_edge_adjacency(m);
        const auto sal = extract_salient_edges(m, adj, 30.0, 16);
        const double spacing = 0.013;
        const auto cloud = sample_salient_points(m, adj, sal, spacing);
        for (const Vec3& p : cloud.points) {
            double best = 1e9;
            for (std::size_t e : sal.edges) {
                const Vec3 a = m.vertices[adj.edges[e][0]], b = m.vertices[adj.edges[e][1]];
                const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
                best = std::min(best, (a + t * (b - a) - p).norm());
            }
            CHECK(best < 1e-9);
        }
        for (std::size_t e : sal.edges) {
            const Vec3 a = m.vertices[adj.edges[e][0]], b = m.vertices[adj.edges[e][1]];
            const auto n = static_cast<std::size_t>(std::ceil((b - a).norm() / spacing));
            CHECK((b - a).norm() / n <= spacing + 1e-12);
        }
    }
    SUBCASE("empty edge set gives an empty cloud")
    {
        const Mesh m = fixtures::cube();
        CHECK(sample_salient_points(m, build_edge_adjacency(m), EdgeSet{}, 0.1).empty());
    }
}
