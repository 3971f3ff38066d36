#include "vc3d/camera.hpp"

#include <cmath>

namespace vc3d {

void Camera::validate() const
{
    if (!position.allFinite() || !look_at.allFinite() || !up.allFinite())
        throw Error("camera: non-finite parameters");
    const Vec3 dir = look_at - position;
    if (dir.norm() == 0.0)
        throw Error("camera: position equals look_at");
    if (!(focal_length > 0.0))
        throw Error("camera: focal length must be positive");
    if (up.norm() == 0.0 || dir.normalized().cross(up.normalized()).norm() < 1e-9)
        throw Error("camera: up vector parallel to view direction");
    if (width <= 0 || height <= 0)
        throw Error("camera: image size must be positive");
}

Eigen::Matrix3d Camera::rotation() const
{
    const Vec3 forward = (look_at - position).normalized();
    const Vec3 right = forward.cross(up).normalized();
    const Vec3 down = forward.cross(right);
    Eigen::Matrix3d r;
    r.row(0) = right.transpose();
    r.row(1) = down.transpose();
    r.row(2) = forward.transpose();
    return r;
}

Vec3 world_to_camera(const Camera& camera, const Vec3& p)
{
    return camera.rotation() * (p - camera.position);
}

Vec3 camera_to_world(const Camera& camera, const Vec3& p)
{
    return camera.rotation().transpose() * p + camera.position;
}

Camera orbit_camera(double azimuth_deg, double elevation_deg, double radius, int width, int height)
{
    const double az = deg_to_rad(azimuth_deg);
    const double el = deg_to_rad(elevation_deg);
    Camera c;
    c.position = radius * Vec3(std::cos(el) * std::sin(az), std::sin(el), std::cos(el) * std::cos(az));
    c.look_at = Vec3::Zero();
    c.up = Vec3::UnitY();
    c.width = width;
    c.height = height;
    // Keeps anything inside the radius-sqrt(3) ball in frame from distance 2.5.
    c.focal_length = 0.5 * std::min(width, height);
    c.principal_point = Vec2(0.5 * width, 0.5 * height);
    return c;
}

}  // namespace vc3d
