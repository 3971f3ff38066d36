#include "vc3d/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace vc3d {

using nlohmann::json;

double round_sig9(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

namespace {

json vec_json(const Vec3& v)
{
    return json::array({round_sig9(v.x()), round_sig9(v.y()), round_sig9(v.z())});
}

Vec3 vec_from(const json& j)
{
    if (!j.is_array() || j.size() != 3)
        throw Error("curves.json: expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

std::string curves_to_json(const VectorGraphic3D& graphic)
{
    json doc;
    doc["version"] = kCurvesFormatVersion;
    doc["transform"] = {{"center", vec_json(graphic.transform.center)},
                        {"scale", round_sig9(graphic.transform.scale)}};
    json curves = json::array();
    for (const CubicBezier3& c : graphic.curves) {
        json pts = json::array();
        for (const Vec3& p : c.p)
            pts.push_back(vec_json(p));
        curves.push_back({{"p", pts}, {"frozen", c.frozen}, {"provenance", to_string(c.provenance)}});
    }
    doc["curves"] = curves;
    return doc.dump(1) + "\n";
}

VectorGraphic3D curves_from_json(const std::string& text)
{
    VectorGraphic3D g;
    try {
        const json doc = json::parse(text);
        if (doc.at("version").get<int>() != kCurvesFormatVersion)
            throw Error("curves.json: unsupported version");
        g.transform.center = vec_from(doc.at("transform").at("center"));
        g.transform.scale = doc.at("transform").at("scale").get<double>();
        for (const json& jc : doc.at("curves")) {
            CubicBezier3 c;
            const json& p = jc.at("p");
            if (!p.is_array() || p.size() != 4)
                throw Error("curves.json: a curve needs 4 control points");
            for (int k = 0; k < 4; ++k)
                c.p[k] = vec_from(p[k]);
            c.frozen = jc.value("frozen", false);
            const std::string prov = jc.value("provenance", "stage1");
            if (prov != "stage1" && prov != "stage2")
                throw Error("curves.json: unknown provenance '" + prov + "'");
            c.provenance = prov == "stage1" ? Provenance::Stage1 : Provenance::Stage2;
            g.curves.push_back(c);
        }
    } catch (const json::exception& e) {
        throw Error(std::string("curves.json: ") + e.what());
    }
    return g;
}

VectorGraphic3D round_trip(const VectorGraphic3D& graphic)
{
    return curves_from_json(curves_to_json(graphic));
}

std::string clusters_to_json(const std::vector<Cluster>& clusters, const ClusterConfig& cfg)
{
    json doc;
    doc["config"] = {{"d_thresh", cfg.d_thresh},         {"theta_thresh", cfg.theta_thresh_deg},
                     {"k", cfg.k},                       {"tau", cfg.tau},
                     {"rng_seed", cfg.rng_seed},         {"split_corners", cfg.split_corners}};
    json list = json::array();
    for (const Cluster& c : clusters) {
        json links = json::array();
        for (bool b : c.admitted_next)
            links.push_back(b ? 1 : 0);
        list.push_back({{"seed", c.seed}, {"members", c.members}, {"admitted_next", links}});
    }
    doc["clusters"] = list;
    return doc.dump() + "\n";
}

std::string coverage_to_json(const CoverageReport& report)
{
    json doc;
    doc["r_cover"] = report.r_cover;
    doc["ratio"] = report.ratio;
    doc["total"] = report.covered.size();
    doc["uncovered"] = report.uncovered;
    return doc.dump() + "\n";
}

std::string loss_csv(const std::vector<double>& history)
{
    std::string out = "step,loss\n";
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, history[i]);
        out += buf;
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("unreadable file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << content;
    if (!out)
        throw Error("write failed: " + path.string());
}

}  // namespace vc3d
