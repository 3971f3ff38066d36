#include "fixtures.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fixtures {

using vc3d::Face;

namespace {

Mesh finish(std::vector<Vec3> v, const std::vector<Face>& f)
{
    return vc3d::build_mesh(std::move(v), f).mesh;
}

}  // namespace

Mesh box(const Vec3& lo, const Vec3& hi)
{
    std::vector<Vec3> v;
    for (int i = 0; i < 8; ++i)
        v.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
    // Each quad listed counter-clockwise seen from outside.
    const int quads[6][4] = {
        {0, 2, 3, 1},  // -z
        {4, 5, 7, 6},  // +z
        {0, 1, 5, 4},  // -y
        {2, 6, 7, 3},  // +y
        {0, 4, 6, 2},  // -x
        {1, 3, 7, 5},  // +x
    };
    std::vector<Face> f;
    for (const auto& q : quads) {
        f.push_back({std::uint32_t(q[0]), std::uint32_t(q[1]), std::uint32_t(q[2])});
        f.push_back({std::uint32_t(q[0]), std::uint32_t(q[2]), std::uint32_t(q[3])});
    }
    return finish(v, f);
}

Mesh icosphere(int subdivisions)
{
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                           {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    for (Vec3& p : v)
        p.normalize();
    std::vector<Face> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                           {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                           {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end())
                return it->second;
            v.push_back((v[a] + v[b]).normalized());
            const auto idx = static_cast<std::uint32_t>(v.size() - 1);
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        for (const Face& tri : f) {
            const auto ab = midpoint(tri[0], tri[1]);
            const auto bc = midpoint(tri[1], tri[2]);
            const auto ca = midpoint(tri[2], tri[0]);
            next.push_back({tri[0], ab, ca});
            next.push_back({tri[1], bc, ab});
            next.push_back({tri[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    return finish(v, f);
}

Mesh torus(int nu, int nv, double R, double r)
{
    std::vector<Vec3> v;
    const double two_pi = 2.0 * 3.14159265358979323846;
    for (int i = 0; i < nu; ++i) {
        const double u = two_pi * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double w = two_pi * j / nv;
            v.emplace_back((R + r * std::cos(w)) * std::cos(u), r * std::sin(w), (R + r * std::cos(w)) * std::sin(u));
        }
    }
    std::vector<Face> f;
    auto id = [&](int i, int j) { return static_cast<std::uint32_t>(((i + nu) % nu) * nv + (j + nv) % nv); };
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            f.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    return finish(v, f);
}

Mesh single_triangle()
{
    return finish({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}});
}

Mesh two_triangles()
{
    return finish({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, {{0, 1, 2}, {0, 2, 3}});
}

std::string to_obj(const Mesh& mesh)
{
    std::ostringstream out;
    out.precision(17);
    for (const Vec3& p : mesh.vertices)
        out << "v " << p.x() << " " << p.y() << " " << p.z() << "\n";
    for (const Face& fc : mesh.faces)
        out << "f " << fc[0] + 1 << " " << fc[1] + 1 << " " << fc[2] + 1 << "\n";
    return out.str();
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream(path) << to_obj(mesh);
}

std::filesystem::path temp_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("vc3d_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::vector<Vec3> segment_points(const Vec3& a, const Vec3& b, double spacing)
{
    const auto n = static_cast<int>(std::ceil((b - a).norm() / spacing - 1e-9));
    std::vector<Vec3> out;
    for (int i = 0; i <= n; ++i)
        out.push_back(a + (b - a) * (static_cast<double>(i) / n));
    return out;
}

namespace {

// Circular arc leaving `start` along `dir`, bending towards `bend`.
std::vector<Vec3> arc_points(const Vec3& start, const Vec3& dir, const Vec3& bend, double radius, double length,
                             double spacing, Vec3* tip)
{
    const Vec3 d = dir.normalized();
    const Vec3 n = (bend - bend.dot(d) * d).normalized();
    const Vec3 center = start + radius * n;
    const auto count = static_cast<int>(std::ceil(length / spacing));
    std::vector<Vec3> out;
    for (int i = 1; i <= count; ++i) {
        const double phi = (length * i / count) / radius;
        out.push_back(center - radius * std::cos(phi) * n + radius * std::sin(phi) * d);
    }
    *tip = out.back();
    return out;
}

}  // namespace

Coral coral(double spacing)
{
    Coral c;
    auto add = [&](const std::vector<Vec3>& pts) { c.points.insert(c.points.end(), pts.begin(), pts.end()); };
    const Vec3 base(0, -1, 0), fork(0, 0.1, 0), tip_a(-0.85, 0.6, 0.0), tip_b(0.8, 0.55, 0.25);
    add(segment_points(base, fork, spacing));
    // Two limbs from the fork; the fork point itself is already in the trunk.
    auto limb_a = segment_points(fork, tip_a, spacing);
    auto limb_b = segment_points(fork, tip_b, spacing);
    add(std::vector<Vec3>(limb_a.begin() + 1, limb_a.end()));
    add(std::vector<Vec3>(limb_b.begin() + 1, limb_b.end()));

    // Twigs leave far enough from every junction that the trunk and limb
    // pieces between them stay long.
    struct Twig {
        Vec3 root, dir, bend;
    };
    const auto on = [](const Vec3& a, const Vec3& b, double s) { return a + s * (b - a); };
    const Twig twigs[] = {
        {on(base, fork, 0.5), Vec3(1, 0.2, 0), Vec3(0, 1, 0)},
        {on(fork, tip_a, 0.5), Vec3(-0.3, -0.2, 1), Vec3(0, 1, 0)},
        {on(fork, tip_b, 0.5), Vec3(0.2, -0.1, -1), Vec3(1, 0, 0)},
        {tip_a, Vec3(-0.2, -0.3, -1), Vec3(0, 1, 0)},
        {tip_b, Vec3(0.1, -0.2, 1), Vec3(0, 1, 0)},
    };
    for (const Twig& t : twigs) {
        Vec3 tip;
        add(arc_points(t.root, t.dir, t.bend, 0.5, 0.3, spacing, &tip));
        c.twig_tips.push_back(tip);
    }
    return c;
}

vc3d::CubicBezier3 random_curve(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    vc3d::CubicBezier3 c;
    for (Vec3& p : c.p)
        p = Vec3(u(rng), u(rng), u(rng));
    return c;
}

std::vector<Vec3> cube_corners()
{
    std::vector<Vec3> out;
    for (int i = 0; i < 8; ++i)
        out.emplace_back(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
    return out;
}

}  // namespace fixtures
