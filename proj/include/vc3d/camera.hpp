#pragma once

#include "vc3d/types.hpp"

#include <Eigen/Core>

namespace vc3d {

// Pinhole camera. The camera frame has x to the right, y down and z along the
// viewing direction, so image-plane coordinates are (f*x/z, f*y/z) with y
// already pointing down the canvas. focal_length is in pixels.
struct Camera {
    Vec3 position{0, 0, 2.5};
    Vec3 look_at{0, 0, 0};
    Vec3 up{0, 1, 0};
    double focal_length = 256.0;
    Vec2 principal_point{256.0, 256.0};
    int width = 512;
    int height = 512;

    // Throws vc3d::Error when an invariant is violated.
    void validate() const;

    // Rows are the camera x (right), y (down) and z (forward) axes in world
    // coordinates.
    Eigen::Matrix3d rotation() const;
};

Vec3 world_to_camera(const Camera& camera, const Vec3& p);
Vec3 camera_to_world(const Camera& camera, const Vec3& p);

// Camera on a sphere around the origin, looking at the origin with +y up.
// Azimuth 0 sits on +z; positive elevation raises the camera towards +y.
Camera orbit_camera(double azimuth_deg, double elevation_deg, double radius, int width = 512,
                    int height = 512);

}  // namespace vc3d
