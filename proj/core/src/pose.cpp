#include "hccepose/pose.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hcce {

bool is_rotation(const Eigen::Matrix3d& r, double tol) {
    const Eigen::Matrix3d gram = r.transpose() * r;
    if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(r.determinant() - 1.0) <= tol;
}

Eigen::Matrix3d closest_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    Eigen::Matrix3d v = svd.matrixV();
    Eigen::Matrix3d r = u * v.transpose();
    if (r.determinant() < 0.0) {
        u.col(2) *= -1.0;
        r = u * v.transpose();
    }
    return r;
}

double rotation_geodesic(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    const double trace = (a.transpose() * b).trace();
    const double c = std::clamp((trace - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(c);
}

}  // namespace hcce
