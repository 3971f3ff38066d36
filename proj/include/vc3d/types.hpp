#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace vc3d {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

// Base class for every error raised by the library. Messages are meant to be
// shown to a user as-is.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double deg_to_rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }

}  // namespace vc3d
