#pragma once

#include <span>
#include <vector>

#include "hccepose/coordinate_map.hpp"
#include "hccepose/mesh.hpp"
#include "hccepose/pose.hpp"

namespace hcce {

struct PoseErrorReport {
    double add = 0.0;           // meters
    double adds = 0.0;          // meters
    double rot_geodesic = 0.0;  // radians
    double trans_l2 = 0.0;      // meters
};

/// Mean distance between identically indexed vertices under the two poses.
double add_error(const TriangleMesh& mesh, const Pose& pose_gt, const Pose& pose_pred);

/// Mean distance from each ground-truth-transformed vertex to its nearest
/// predicted-transformed vertex (symmetric-object variant).
double adds_error(const TriangleMesh& mesh, const Pose& pose_gt, const Pose& pose_pred);

PoseErrorReport pose_errors(const TriangleMesh& mesh, const Pose& pose_gt,
                            const Pose& pose_pred);

/// Share of errors strictly below fraction * diameter.
/// Throws DegenerateInputError on an empty list.
double recall_at_threshold(std::span<const double> errors, double diameter, double fraction);

/// Area under the recall-vs-threshold step function over [0, max_threshold],
/// normalized by max_threshold and computed in closed form:
/// mean over errors of max(0, 1 - e / max_threshold).
double auc(std::span<const double> errors, double max_threshold = 0.10);

struct CoordinateAccuracyRow {
    double fraction = 0.0;
    double front = 0.0;
    double back = 0.0;
};

/// Per-threshold share of pixels (over the mask intersection) whose front /
/// back coordinate error is below fraction * diameter.
std::vector<CoordinateAccuracyRow> coordinate_accuracy(
    const CoordinateMap& pred, const CoordinateMap& gt, double diameter,
    const std::vector<double>& fractions = {0.02, 0.05, 0.10});

}  // namespace hcce
