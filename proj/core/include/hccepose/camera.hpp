#pragma once

#include <Eigen/Core>

#include <optional>

#include "hccepose/errors.hpp"
#include "hccepose/pose.hpp"

namespace hcce {

/// Pinhole camera. Pixel (u, v) covers [u, u+1) x [v, v+1); rays are cast
/// through pixel centers (u + 0.5, v + 0.5).
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;

    void validate() const;
};

/// Projects a model-space point. Throws BehindCameraError when the
/// camera-space depth is <= 1e-9.
Eigen::Vector2d project(const Eigen::Vector3d& point, const Pose& pose,
                        const CameraIntrinsics& k);

/// Projection of a camera-space point, or nullopt when behind the camera.
std::optional<Eigen::Vector2d> try_project_camera(const Eigen::Vector3d& camera_point,
                                                  const CameraIntrinsics& k);

/// Unnormalized direction of the ray through pixel center (u+0.5, v+0.5),
/// scaled so its z component is 1; ray parameter equals camera-space depth.
Eigen::Vector3d pixel_ray_direction(int u, int v, const CameraIntrinsics& k);

}  // namespace hcce
