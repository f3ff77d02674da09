#pragma once

#include <Eigen/Core>

namespace hcce {

/// Rigid transform from model space to camera space.
struct Pose {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

/// True when R'R = I and det(R) = +1 within tol.
bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9);

/// Nearest rotation matrix (polar decomposition), with det forced to +1.
Eigen::Matrix3d closest_rotation(const Eigen::Matrix3d& m);

/// Geodesic distance between two rotations, in radians.
double rotation_geodesic(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace hcce
