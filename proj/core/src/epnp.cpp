#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>

#include "hccepose/errors.hpp"
#include "hccepose/pnp.hpp"

namespace hcce {

namespace {

// Relative eigenvalue thresholds on the point covariance. Below kCollinear
// the points carry no second direction; below kPlanar the third direction is
// treated as absent and the planar (3 control point) formulation is used.
constexpr double kCollinearRatio = 1e-12;
constexpr double kPlanarRatio = 1e-8;
constexpr int kGaussNewtonIters = 6;

struct ControlFrame {
    int count = 0;                           // 3 (planar) or 4
    std::array<Eigen::Vector3d, 4> world{};  // control points, model space
    Eigen::MatrixXd alphas;                  // n x count barycentric coords
};

ControlFrame choose_control_points(std::span<const PixelPointPair> pairs) {
    const int n = static_cast<int>(pairs.size());
    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (const auto& pr : pairs) centroid += pr.point;
    centroid /= static_cast<double>(n);

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& pr : pairs) {
        const Eigen::Vector3d d = pr.point - centroid;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d evals = eig.eigenvalues();  // ascending
    const Eigen::Matrix3d evecs = eig.eigenvectors();
    const double largest = evals[2];
    if (!(largest > 0.0) || evals[1] <= kCollinearRatio * largest) {
        throw DegenerateInputError("epnp_solve: 3D points are (nearly) collinear");
    }

    ControlFrame frame;
    frame.world[0] = centroid;
    frame.world[1] = centroid + std::sqrt(evals[2]) * evecs.col(2);
    frame.world[2] = centroid + std::sqrt(evals[1]) * evecs.col(1);
    if (evals[0] <= kPlanarRatio * largest) {
        frame.count = 3;
    } else {
        frame.count = 4;
        frame.world[3] = centroid + std::sqrt(evals[0]) * evecs.col(0);
    }

    frame.alphas.resize(n, frame.count);
    if (frame.count == 4) {
        Eigen::Matrix3d basis;
        basis.col(0) = frame.world[1] - frame.world[0];
        basis.col(1) = frame.world[2] - frame.world[0];
        basis.col(2) = frame.world[3] - frame.world[0];
        const Eigen::PartialPivLU<Eigen::Matrix3d> lu(basis);
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector3d x = lu.solve(pairs[i].point - frame.world[0]);
            frame.alphas(i, 0) = 1.0 - x.sum();
            frame.alphas(i, 1) = x[0];
            frame.alphas(i, 2) = x[1];
            frame.alphas(i, 3) = x[2];
        }
    } else {
        Eigen::Matrix<double, 3, 2> basis;
        basis.col(0) = frame.world[1] - frame.world[0];
        basis.col(1) = frame.world[2] - frame.world[0];
        const Eigen::Matrix2d gram = basis.transpose() * basis;
        const Eigen::PartialPivLU<Eigen::Matrix2d> lu(gram);
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d x =
                lu.solve(basis.transpose() * (pairs[i].point - frame.world[0]));
            frame.alphas(i, 0) = 1.0 - x.sum();
            frame.alphas(i, 1) = x[0];
            frame.alphas(i, 2) = x[1];
        }
    }
    return frame;
}

// Pairwise distance constraints between control points.
struct DistanceSystem {
    std::vector<std::array<int, 2>> index_pairs;
    Eigen::VectorXd squared_dists;
};

DistanceSystem make_distance_system(const ControlFrame& frame) {
    DistanceSystem sys;
    for (int i = 0; i < frame.count; ++i) {
        for (int j = i + 1; j < frame.count; ++j) {
            sys.index_pairs.push_back({i, j});
        }
    }
    sys.squared_dists.resize(static_cast<int>(sys.index_pairs.size()));
    for (std::size_t p = 0; p < sys.index_pairs.size(); ++p) {
        const auto [i, j] = sys.index_pairs[p];
        sys.squared_dists[static_cast<int>(p)] =
            (frame.world[i] - frame.world[j]).squaredNorm();
    }
    return sys;
}

// kernel[k][c]: 3-vector of nullspace direction k at control point c.
using KernelVectors = std::vector<std::array<Eigen::Vector3d, 4>>;

// Gauss-Newton on the squared-distance residuals over the full beta vector,
// so minimal samples (whose nullspace has full dimension) remain solvable.
void refine_betas(const KernelVectors& kernel, const DistanceSystem& sys,
                  Eigen::VectorXd& betas) {
    const int num_pairs = static_cast<int>(sys.index_pairs.size());
    const int num_betas = static_cast<int>(betas.size());
    Eigen::MatrixXd jac(num_pairs, num_betas);
    Eigen::VectorXd residual(num_pairs);
    for (int iter = 0; iter < kGaussNewtonIters; ++iter) {
        for (int p = 0; p < num_pairs; ++p) {
            const auto [i, j] = sys.index_pairs[p];
            Eigen::Vector3d dv = Eigen::Vector3d::Zero();
            for (int kv = 0; kv < num_betas; ++kv) {
                dv += betas[kv] * (kernel[kv][i] - kernel[kv][j]);
            }
            residual[p] = dv.squaredNorm() - sys.squared_dists[p];
            for (int kv = 0; kv < num_betas; ++kv) {
                jac(p, kv) = 2.0 * dv.dot(kernel[kv][i] - kernel[kv][j]);
            }
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * residual;
        const Eigen::VectorXd delta =
            (jtj + 1e-12 * Eigen::MatrixXd::Identity(num_betas, num_betas)).ldlt().solve(-jtr);
        if (!delta.allFinite()) break;
        betas += delta;
    }
}

// Rigid alignment world -> camera over the full point sets (Horn's method).
Pose procrustes(const Eigen::MatrixXd& world, const Eigen::MatrixXd& camera) {
    const Eigen::Vector3d wc = world.colwise().mean();
    const Eigen::Vector3d cc = camera.colwise().mean();
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    for (int i = 0; i < world.rows(); ++i) {
        h += (world.row(i).transpose() - wc) * (camera.row(i) - cc.transpose());
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    Eigen::Matrix3d r = v * u.transpose();
    if (r.determinant() < 0.0) {
        u.col(2) *= -1.0;
        r = v * u.transpose();
    }
    Pose pose;
    pose.rotation = r;
    pose.translation = cc - r * wc;
    return pose;
}

double reprojection_rms(std::span<const PixelPointPair> pairs, const Pose& pose,
                        const CameraIntrinsics& k) {
    double sum_sq = 0.0;
    for (const auto& pr : pairs) {
        const Eigen::Vector3d cam = pose.apply(pr.point);
        if (cam.z() <= 1e-9) return std::numeric_limits<double>::infinity();
        const Eigen::Vector2d proj(k.fx * cam.x() / cam.z() + k.cx,
                                   k.fy * cam.y() / cam.z() + k.cy);
        sum_sq += (proj - pr.pixel).squaredNorm();
    }
    return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

// Initial beta estimates per assumed nullspace dimension, via the classic
// linearized distance-constraint solves. Results are padded to total_betas.
Eigen::VectorXd betas_case_1(const KernelVectors& kernel, const DistanceSystem& sys,
                             int total_betas) {
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < sys.index_pairs.size(); ++p) {
        const auto [i, j] = sys.index_pairs[p];
        const Eigen::Vector3d dv = kernel[0][i] - kernel[0][j];
        num += dv.norm() * std::sqrt(sys.squared_dists[static_cast<int>(p)]);
        den += dv.squaredNorm();
    }
    Eigen::VectorXd betas = Eigen::VectorXd::Zero(total_betas);
    betas[0] = den > 0.0 ? num / den : 0.0;
    return betas;
}

Eigen::VectorXd betas_case_2(const KernelVectors& kernel, const DistanceSystem& sys,
                             int total_betas) {
    const int num_pairs = static_cast<int>(sys.index_pairs.size());
    Eigen::MatrixXd l(num_pairs, 3);
    for (int p = 0; p < num_pairs; ++p) {
        const auto [i, j] = sys.index_pairs[p];
        const Eigen::Vector3d dv1 = kernel[0][i] - kernel[0][j];
        const Eigen::Vector3d dv2 = kernel[1][i] - kernel[1][j];
        l(p, 0) = dv1.squaredNorm();
        l(p, 1) = 2.0 * dv1.dot(dv2);
        l(p, 2) = dv2.squaredNorm();
    }
    const Eigen::Vector3d b =
        l.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(sys.squared_dists);
    Eigen::VectorXd betas = Eigen::VectorXd::Zero(total_betas);
    if (b[0] < 0.0) {
        betas[0] = std::sqrt(-b[0]);
        betas[1] = b[2] < 0.0 ? std::sqrt(-b[2]) : 0.0;
    } else {
        betas[0] = std::sqrt(b[0]);
        betas[1] = b[2] > 0.0 ? std::sqrt(b[2]) : 0.0;
    }
    if (b[1] < 0.0) betas[0] = -betas[0];
    return betas;
}

Eigen::VectorXd betas_case_3(const KernelVectors& kernel, const DistanceSystem& sys,
                             int total_betas) {
    const int num_pairs = static_cast<int>(sys.index_pairs.size());
    Eigen::MatrixXd l(num_pairs, 5);
    for (int p = 0; p < num_pairs; ++p) {
        const auto [i, j] = sys.index_pairs[p];
        const Eigen::Vector3d dv1 = kernel[0][i] - kernel[0][j];
        const Eigen::Vector3d dv2 = kernel[1][i] - kernel[1][j];
        const Eigen::Vector3d dv3 = kernel[2][i] - kernel[2][j];
        l(p, 0) = dv1.squaredNorm();
        l(p, 1) = 2.0 * dv1.dot(dv2);
        l(p, 2) = dv2.squaredNorm();
        l(p, 3) = 2.0 * dv1.dot(dv3);
        l(p, 4) = 2.0 * dv2.dot(dv3);
    }
    const Eigen::VectorXd b =
        l.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(sys.squared_dists);
    Eigen::VectorXd betas = Eigen::VectorXd::Zero(total_betas);
    if (b[0] < 0.0) {
        betas[0] = std::sqrt(-b[0]);
        betas[1] = b[2] < 0.0 ? std::sqrt(-b[2]) : 0.0;
    } else {
        betas[0] = std::sqrt(b[0]);
        betas[1] = b[2] > 0.0 ? std::sqrt(b[2]) : 0.0;
    }
    if (b[1] < 0.0) betas[0] = -betas[0];
    betas[2] = betas[0] != 0.0 ? b[3] / betas[0] : 0.0;
    return betas;
}

}  // namespace

Pose epnp_solve(std::span<const PixelPointPair> pairs, const CameraIntrinsics& k) {
    k.validate();
    const int n = static_cast<int>(pairs.size());
    if (n < 4) {
        throw DegenerateInputError("epnp_solve: need at least 4 correspondences, got " +
                                   std::to_string(n));
    }

    const ControlFrame frame = choose_control_points(pairs);
    const int dims = 3 * frame.count;

    // M'M accumulated directly; each correspondence contributes two rows.
    Eigen::MatrixXd mtm = Eigen::MatrixXd::Zero(dims, dims);
    {
        Eigen::VectorXd row_u(dims), row_v(dims);
        for (int i = 0; i < n; ++i) {
            const double u = pairs[i].pixel.x();
            const double v = pairs[i].pixel.y();
            for (int c = 0; c < frame.count; ++c) {
                const double a = frame.alphas(i, c);
                row_u[3 * c + 0] = a * k.fx;
                row_u[3 * c + 1] = 0.0;
                row_u[3 * c + 2] = a * (k.cx - u);
                row_v[3 * c + 0] = 0.0;
                row_v[3 * c + 1] = a * k.fy;
                row_v[3 * c + 2] = a * (k.cy - v);
            }
            mtm.noalias() += row_u * row_u.transpose();
            mtm.noalias() += row_v * row_v.transpose();
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mtm);
    if (eig.info() != Eigen::Success) {
        throw DegenerateInputError("epnp_solve: eigen-decomposition failed");
    }

    const int kernel_size = frame.count == 4 ? 4 : 3;
    KernelVectors kernel(kernel_size);
    for (int kv = 0; kv < kernel_size; ++kv) {
        const Eigen::VectorXd col = eig.eigenvectors().col(kv);  // ascending eigenvalues
        for (int c = 0; c < frame.count; ++c) {
            kernel[kv][c] = col.segment<3>(3 * c);
        }
    }

    const DistanceSystem sys = make_distance_system(frame);
    Eigen::MatrixXd world_pts(n, 3);
    for (int i = 0; i < n; ++i) world_pts.row(i) = pairs[i].point.transpose();

    const int max_case = frame.count == 4 ? 3 : 2;
    Pose best_pose;
    double best_rms = std::numeric_limits<double>::infinity();

    for (int num_kernel = 1; num_kernel <= max_case; ++num_kernel) {
        Eigen::VectorXd betas;
        switch (num_kernel) {
            case 1: betas = betas_case_1(kernel, sys, kernel_size); break;
            case 2: betas = betas_case_2(kernel, sys, kernel_size); break;
            default: betas = betas_case_3(kernel, sys, kernel_size); break;
        }
        refine_betas(kernel, sys, betas);

        std::array<Eigen::Vector3d, 4> cam_controls{};
        for (int c = 0; c < frame.count; ++c) {
            Eigen::Vector3d p = Eigen::Vector3d::Zero();
            for (int kv = 0; kv < kernel_size; ++kv) p += betas[kv] * kernel[kv][c];
            cam_controls[c] = p;
        }

        Eigen::MatrixXd cam_pts(n, 3);
        for (int i = 0; i < n; ++i) {
            Eigen::Vector3d p = Eigen::Vector3d::Zero();
            for (int c = 0; c < frame.count; ++c) p += frame.alphas(i, c) * cam_controls[c];
            cam_pts.row(i) = p.transpose();
        }
        // The kernel sign is arbitrary; flip so the points sit in front.
        int negative = 0;
        for (int i = 0; i < n; ++i) negative += cam_pts(i, 2) < 0.0 ? 1 : 0;
        if (negative * 2 > n) cam_pts = -cam_pts;

        const Pose candidate = procrustes(world_pts, cam_pts);
        const double rms = reprojection_rms(pairs, candidate, k);
        if (rms < best_rms) {
            best_rms = rms;
            best_pose = candidate;
        }
    }

    if (!std::isfinite(best_rms)) {
        throw DegenerateInputError(
            "epnp_solve: no candidate kept all points in front of the camera");
    }
    best_pose.rotation = closest_rotation(best_pose.rotation);
    return best_pose;
}

std::vector<double> reprojection_errors(const Pose& pose, const CorrespondenceSet& set,
                                        const CameraIntrinsics& k) {
    std::vector<double> errors;
    errors.reserve(set.records.size());
    for (const auto& rec : set.records) {
        const auto proj = try_project_camera(pose.apply(rec.point), k);
        errors.push_back(proj ? (*proj - rec.pixel).norm()
                              : std::numeric_limits<double>::infinity());
    }
    return errors;
}

}  // namespace hcce
