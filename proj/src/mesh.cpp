#include "vc3d/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace vc3d {

namespace {

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b)
{
    if (a > b)
        std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

double longest_side(const std::vector<Vec3>& vertices)
{
    if (vertices.empty())
        return 0.0;
    Vec3 lo = vertices.front(), hi = lo;
    for (const Vec3& v : vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).maxCoeff();
}

// OBJ vertex reference: "7", "7/1", "7//3", "-2/..."; 1-based or negative.
std::uint32_t parse_obj_index(const std::string& token, std::size_t vertex_count, std::size_t line_no)
{
    const std::string head = token.substr(0, token.find('/'));
    long idx = 0;
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
    if (ec != std::errc() || ptr != head.data() + head.size() || idx == 0)
        throw Error("malformed OBJ face index '" + token + "' on line " + std::to_string(line_no));
    const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count))
        throw Error("OBJ face index out of range on line " + std::to_string(line_no));
    return static_cast<std::uint32_t>(resolved);
}

void fan_triangulate(const std::vector<std::uint32_t>& poly, std::vector<Face>& faces)
{
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        faces.push_back({poly[0], poly[i], poly[i + 1]});
}

LoadedMesh parse_obj(std::string_view text)
{
    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#')
            continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x() >> v.y() >> v.z()))
                throw Error("malformed OBJ vertex on line " + std::to_string(line_no));
            vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> poly;
            std::string tok;
            while (ls >> tok)
                poly.push_back(parse_obj_index(tok, vertices.size(), line_no));
            if (poly.size() < 3)
                throw Error("OBJ face with fewer than 3 vertices on line " + std::to_string(line_no));
            fan_triangulate(poly, faces);
        }
    }
    return build_mesh(std::move(vertices), faces);
}

LoadedMesh parse_ply(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
        throw Error("unsupported format: missing PLY magic");

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> props;  // property names; list properties prefixed with '*'
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word == "format") {
            std::string fmt;
            ls >> fmt;
            ascii = fmt == "ascii";
        } else if (word == "element") {
            Element e;
            ls >> e.name >> e.count;
            elements.push_back(e);
        } else if (word == "property") {
            if (elements.empty())
                throw Error("malformed PLY header: property before element");
            std::string type, name;
            ls >> type;
            if (type == "list") {
                std::string count_type, item_type;
                ls >> count_type >> item_type >> name;
                name = "*" + name;
            } else {
                ls >> name;
            }
            elements.back().props.push_back(name);
        } else if (word == "end_header") {
            break;
        }
    }
    if (!ascii)
        throw Error("unsupported format: only ASCII PLY is supported");

    std::vector<Vec3> vertices;
    std::vector<Face> faces;
    for (const Element& e : elements) {
        int ix = -1, iy = -1, iz = -1;
        for (std::size_t i = 0; i < e.props.size(); ++i) {
            if (e.props[i] == "x") ix = static_cast<int>(i);
            if (e.props[i] == "y") iy = static_cast<int>(i);
            if (e.props[i] == "z") iz = static_cast<int>(i);
        }
        for (std::size_t row = 0; row < e.count; ++row) {
            if (!std::getline(in, line))
                throw Error("truncated PLY body in element '" + e.name + "'");
            std::istringstream ls(line);
            if (e.name == "vertex") {
                if (ix < 0 || iy < 0 || iz < 0)
                    throw Error("PLY vertex element lacks x/y/z");
                Vec3 v = Vec3::Zero();
                for (std::size_t p = 0; p < e.props.size(); ++p) {
                    double value = 0;
                    if (e.props[p][0] == '*') {
                        std::size_t n = 0;
                        ls >> n;
                        for (std::size_t k = 0; k < n; ++k)
                            ls >> value;
                        continue;
                    }
                    if (!(ls >> value))
                        throw Error("malformed PLY vertex row");
                    if (static_cast<int>(p) == ix) v.x() = value;
                    if (static_cast<int>(p) == iy) v.y() = value;
                    if (static_cast<int>(p) == iz) v.z() = value;
                }
                vertices.push_back(v);
            } else if (e.name == "face") {
                std::size_t n = 0;
                if (!(ls >> n) || n < 3)
                    throw Error("malformed PLY face row");
                std::vector<std::uint32_t> poly(n);
                for (auto& idx : poly) {
                    long value = -1;
                    if (!(ls >> value) || value < 0)
                        throw Error("malformed PLY face index");
                    idx = static_cast<std::uint32_t>(value);
                }
                fan_triangulate(poly, faces);
            }
        }
    }
    return build_mesh(std::move(vertices), faces);
}

}  // namespace

LoadedMesh build_mesh(std::vector<Vec3> vertices, const std::vector<Face>& faces)
{
    LoadedMesh out;
    out.mesh.vertices = std::move(vertices);
    const auto& verts = out.mesh.vertices;
    for (const Vec3& v : verts)
        if (!v.allFinite())
            throw Error("mesh has non-finite vertex coordinates");

    const double side = longest_side(verts);
    const double area_scale = side > 0 ? (2.0 / side) * (2.0 / side) : 0.0;
    for (const Face& f : faces) {
        for (std::uint32_t idx : f)
            if (idx >= verts.size())
                throw Error("face index out of range");
        const Vec3 cross = (verts[f[1]] - verts[f[0]]).cross(verts[f[2]] - verts[f[0]]);
        const double area = 0.5 * cross.norm() * area_scale;
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2] || !(area >= kDegenerateArea)) {
            ++out.dropped_faces;
            continue;
        }
        out.mesh.faces.push_back(f);
        out.mesh.face_normals.push_back(cross.normalized());
    }
    if (out.mesh.faces.empty())
        throw Error("empty mesh");
    return out;
}

LoadedMesh parse_mesh(std::string_view text, MeshFormat format)
{
    return format == MeshFormat::Obj ? parse_obj(text) : parse_ply(text);
}

LoadedMesh load_mesh(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("unreadable file: " + path.string());
    MeshFormat format;
    if (ext == ".obj")
        format = MeshFormat::Obj;
    else if (ext == ".ply")
        format = MeshFormat::Ply;
    else
        throw Error("unsupported format: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw Error("unreadable file: " + path.string());
    return parse_mesh(buf.str(), format);
}

NormalizedMesh normalize_mesh(const Mesh& mesh)
{
    if (mesh.vertices.empty())
        throw Error("empty mesh");
    Vec3 lo = mesh.vertices.front(), hi = lo;
    for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    const double side = (hi - lo).maxCoeff();
    if (!(side > 0))
        throw Error("mesh has zero extent");

    NormalizedMesh out;
    out.transform.center = 0.5 * (lo + hi);
    out.transform.scale = 2.0 / side;
    out.mesh = mesh;
    for (Vec3& v : out.mesh.vertices)
        v = out.transform.apply(v);
    return out;
}

EdgeAdjacency build_edge_adjacency(const Mesh& mesh)
{
    EdgeAdjacency adj;
    std::unordered_map<std::uint64_t, std::size_t> index;
    index.reserve(mesh.faces.size() * 2);
    for (std::uint32_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const Face& f = mesh.faces[fi];
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = f[k], b = f[(k + 1) % 3];
            auto [it, inserted] = index.try_emplace(edge_key(a, b), adj.edges.size());
            if (inserted) {
                adj.edges.push_back({std::min(a, b), std::max(a, b)});
                adj.edge_faces.emplace_back();
            }
            adj.edge_faces[it->second].push_back(fi);
        }
    }
    return adj;
}

const char* to_string(EdgeLabel label)
{
    switch (label) {
    case EdgeLabel::Sharp: return "sharp";
    case EdgeLabel::Boundary: return "boundary";
    case EdgeLabel::NonManifold: return "non_manifold";
    case EdgeLabel::Silhouette: return "silhouette";
    }
    return "unknown";
}

bool EdgeSet::contains(std::size_t edge) const
{
    return std::binary_search(edges.begin(), edges.end(), edge);
}

std::size_t EdgeSet::count(EdgeLabel label) const
{
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

EdgeSet EdgeSet::merged(const EdgeSet& other) const
{
    EdgeSet out;
    std::size_t i = 0, j = 0;
    while (i < size() || j < other.size()) {
        if (j == other.size() || (i < size() && edges[i] <= other.edges[j])) {
            if (j < other.size() && edges[i] == other.edges[j])
                ++j;
            out.edges.push_back(edges[i]);
            out.labels.push_back(labels[i]);
            ++i;
        } else {
            out.edges.push_back(other.edges[j]);
            out.labels.push_back(other.labels[j]);
            ++j;
        }
    }
    return out;
}

double normal_angle_deg(const Mesh& mesh, const EdgeAdjacency& adj, std::size_t edge)
{
    const auto& fs = adj.edge_faces[edge];
    const Vec3& n0 = mesh.face_normals[fs[0]];
    const Vec3& n1 = mesh.face_normals[fs[1]];
    return rad_to_deg(std::atan2(n0.cross(n1).norm(), n0.dot(n1)));
}

EdgeSet detect_sharp_edges(const Mesh& mesh, const EdgeAdjacency& adj, double theta_sharp_deg)
{
    if (!(theta_sharp_deg > 0.0 && theta_sharp_deg < 180.0))
        throw Error("theta_sharp must lie in (0, 180) degrees");
    EdgeSet out;
    for (std::size_t e = 0; e < adj.size(); ++e) {
        const std::size_t nf = adj.edge_faces[e].size();
        if (nf == 1) {
            out.edges.push_back(e);
            out.labels.push_back(EdgeLabel::Boundary);
        } else if (nf > 2) {
            out.edges.push_back(e);
            out.labels.push_back(EdgeLabel::NonManifold);
        } else if (normal_angle_deg(mesh, adj, e) > theta_sharp_deg) {
            out.edges.push_back(e);
            out.labels.push_back(EdgeLabel::Sharp);
        }
    }
    return out;
}

bool is_front_facing(const Mesh& mesh, std::size_t face, const Vec3& viewpoint)
{
    const Face& f = mesh.faces[face];
    const Vec3 centroid = (mesh.vertices[f[0]] + mesh.vertices[f[1]] + mesh.vertices[f[2]]) / 3.0;
    return mesh.face_normals[face].dot(viewpoint - centroid) > 0.0;
}

EdgeSet detect_silhouette_edges(const Mesh& mesh, const EdgeAdjacency& adj, const Camera& camera)
{
    camera.validate();
    std::vector<signed char> front(mesh.faces.size());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        front[f] = is_front_facing(mesh, f, camera.position) ? 1 : 0;

    EdgeSet out;
    for (std::size_t e = 0; e < adj.size(); ++e) {
        const auto& fs = adj.edge_faces[e];
        if (fs.size() == 2 && front[fs[0]] != front[fs[1]]) {
            out.edges.push_back(e);
            out.labels.push_back(EdgeLabel::Silhouette);
        }
    }
    return out;
}

std::vector<Camera> silhouette_cameras(std::size_t n_views)
{
    std::vector<Camera> cams;
    for (std::size_t k = 0; k < n_views; ++k)
        cams.push_back(orbit_camera(360.0 * static_cast<double>(k) / static_cast<double>(n_views), 0.0,
                                    kSilhouetteRadius));
    return cams;
}

EdgeSet extract_salient_edges(const Mesh& mesh, const EdgeAdjacency& adj, double theta_sharp_deg,
                              std::size_t n_views)
{
    if (n_views < 1)
        throw Error("n_views must be at least 1");
    EdgeSet salient = detect_sharp_edges(mesh, adj, theta_sharp_deg);
    for (const Camera& cam : silhouette_cameras(n_views))
        salient = salient.merged(detect_silhouette_edges(mesh, adj, cam));
    return salient;
}

namespace {

// Hash grid used to merge coincident samples (shared edge endpoints).
class DedupGrid {
public:
    explicit DedupGrid(double cell) : cell_(cell) {}

    // Returns the index of an existing point within kDedupDistance, or stores p.
    std::size_t insert(const Vec3& p, std::vector<Vec3>& points)
    {
        const auto key = cell_of(p);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = cells_.find(hash({key[0] + dx, key[1] + dy, key[2] + dz}));
                    if (it == cells_.end())
                        continue;
                    for (std::size_t idx : it->second)
                        if ((points[idx] - p).norm() <= kDedupDistance)
                            return idx;
                }
        points.push_back(p);
        cells_[hash(key)].push_back(points.size() - 1);
        return points.size() - 1;
    }

private:
    std::array<std::int64_t, 3> cell_of(const Vec3& p) const
    {
        return {static_cast<std::int64_t>(std::floor(p.x() / cell_)),
                static_cast<std::int64_t>(std::floor(p.y() / cell_)),
                static_cast<std::int64_t>(std::floor(p.z() / cell_))};
    }
    static std::uint64_t hash(const std::array<std::int64_t, 3>& k)
    {
        std::uint64_t h = 1469598103934665603ull;
        for (std::int64_t v : k) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ull;
        }
        return h;
    }

    double cell_;
    // Hash collisions only cost extra distance checks.
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

SalientPointCloud sample_salient_points(const Mesh& mesh, const EdgeAdjacency& adj, const EdgeSet& edges,
                                        double spacing)
{
    if (!(spacing > 0.0))
        throw Error("sampling spacing must be positive");
    SalientPointCloud cloud;
    DedupGrid grid(1e-6);
    for (std::size_t e : edges.edges) {
        const Vec3& a = mesh.vertices[adj.edges[e][0]];
        const Vec3& b = mesh.vertices[adj.edges[e][1]];
        const double len = (b - a).norm();
        auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / spacing)));
        // 2.0 / 0.05 rounds up to 40.000000000000004; drop the spurious extra segment.
        if (n > 1 && len / static_cast<double>(n - 1) <= spacing)
            --n;
        for (std::size_t i = 0; i <= n; ++i) {
            const double t = static_cast<double>(i) / static_cast<double>(n);
            grid.insert(i == n ? b : a + t * (b - a), cloud.points);
        }
    }
    return cloud;
}

}  // namespace vc3d
