#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hccepose/camera.hpp"
#include "hccepose/correspondence.hpp"
#include "hccepose/pose.hpp"

namespace hcce {

struct PixelPointPair {
    Eigen::Vector2d pixel;
    Eigen::Vector3d point;
};

/// EPnP: expresses the 3D points as barycentric combinations of four control
/// points (three for planar point sets), recovers the control points in
/// camera space from the nullspace of the 2n x 12 projection system trying
/// nullspace dimensions 1..3, and aligns model to camera control points with
/// orthogonal Procrustes. The candidate with minimum reprojection RMS wins;
/// its rotation is re-orthonormalized by polar decomposition.
///
/// Throws DegenerateInputError for < 4 pairs, collinear points, or when every
/// candidate places points behind the camera.
Pose epnp_solve(std::span<const PixelPointPair> pairs, const CameraIntrinsics& k);

/// Per-record pixel distance between the projected 3D point and the record's
/// pixel center. Records behind the camera get +infinity.
std::vector<double> reprojection_errors(const Pose& pose, const CorrespondenceSet& set,
                                        const CameraIntrinsics& k);

enum class RansacScoring : std::uint8_t {
    /// Most inliers under the threshold; ties broken by lower mean inlier error.
    InlierCount,
    /// Lowest mean error over all scored records (no threshold), for ablation.
    MeanError,
};

struct RansacConfig {
    int iterations = 150;
    double threshold = 2.0;  // pixels
    int sample_size = 4;
    std::uint64_t seed = 0;
    bool refine = true;
    /// Score mid records too; by default only front and back records count.
    bool score_all_sources = false;
    RansacScoring scoring = RansacScoring::InlierCount;
    int threads = 1;

    void validate() const;
};

struct PoseEstimate {
    Pose pose;
    int inlier_count = 0;
    double mean_inlier_error = 0.0;  // pixels; 0 when there are no inliers
    int iterations_used = 0;         // iterations that produced a candidate pose
};

/// One line of the per-iteration log handed to an observer after the run,
/// in iteration order.
struct RansacIterationLog {
    int iteration = 0;
    std::vector<std::int32_t> sample_groups;
    bool degenerate = false;
    int inlier_count = 0;
    double mean_inlier_error = 0.0;
};
using RansacObserver = std::function<void(const RansacIterationLog&)>;

/// Pixel-constrained RANSAC-PnP. Every iteration samples `sample_size`
/// distinct pixel groups and then exactly one record inside each group, so a
/// minimal sample never uses two 3D points of the same pixel. Scoring counts
/// front/back records under the threshold (mid points feed the sampling pool
/// only). The refit over the winner's inliers is kept only when it does not
/// lose inliers. Deterministic for a fixed seed at any thread count.
///
/// Throws InsufficientDataError when distinct groups < sample_size and
/// NoPoseError when no iteration yields a candidate.
PoseEstimate ransac_pnp(const CorrespondenceSet& set, const CameraIntrinsics& k,
                        const RansacConfig& cfg, const RansacObserver& observer = {});

}  // namespace hcce
