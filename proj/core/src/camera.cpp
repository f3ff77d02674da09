#include "hccepose/camera.hpp"

#include <string>

namespace hcce {

namespace {
constexpr double kMinDepth = 1e-9;
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0)) {
        throw DomainError("CameraIntrinsics: focal lengths must be positive");
    }
    if (width < 1 || height < 1) {
        throw DomainError("CameraIntrinsics: viewport must be at least 1x1");
    }
}

Eigen::Vector2d project(const Eigen::Vector3d& point, const Pose& pose,
                        const CameraIntrinsics& k) {
    const Eigen::Vector3d cam = pose.apply(point);
    if (cam.z() <= kMinDepth) {
        throw BehindCameraError("project: point at depth " + std::to_string(cam.z()));
    }
    return {k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy};
}

std::optional<Eigen::Vector2d> try_project_camera(const Eigen::Vector3d& camera_point,
                                                  const CameraIntrinsics& k) {
    if (camera_point.z() <= kMinDepth) return std::nullopt;
    return Eigen::Vector2d(k.fx * camera_point.x() / camera_point.z() + k.cx,
                           k.fy * camera_point.y() / camera_point.z() + k.cy);
}

Eigen::Vector3d pixel_ray_direction(int u, int v, const CameraIntrinsics& k) {
    return {(static_cast<double>(u) + 0.5 - k.cx) / k.fx,
            (static_cast<double>(v) + 0.5 - k.cy) / k.fy, 1.0};
}

}  // namespace hcce
