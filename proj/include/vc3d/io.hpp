#pragma once

#include "vc3d/bezier.hpp"
#include "vc3d/clustering.hpp"
#include "vc3d/refine.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vc3d {

inline constexpr int kCurvesFormatVersion = 1;

// Rounds to 9 significant decimal digits.
double round_sig9(double v);

// {"version":1,"transform":{"center":[x,y,z],"scale":s},
//  "curves":[{"p":[[x,y,z]x4],"frozen":bool,"provenance":"stage1"|"stage2"}]}
// Coordinates are normalized; transform maps source units to them.
std::string curves_to_json(const VectorGraphic3D& graphic);
VectorGraphic3D curves_from_json(const std::string& text);

// The curve set as it reads back from curves_to_json (values rounded).
VectorGraphic3D round_trip(const VectorGraphic3D& graphic);

std::string clusters_to_json(const std::vector<Cluster>& clusters, const ClusterConfig& cfg);
std::string coverage_to_json(const CoverageReport& report);
std::string loss_csv(const std::vector<double>& history);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace vc3d
