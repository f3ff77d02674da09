#include "hccepose/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hccepose/errors.hpp"
#include "hccepose/kdtree.hpp"

namespace hcce {

double add_error(const TriangleMesh& mesh, const Pose& pose_gt, const Pose& pose_pred) {
    double sum = 0.0;
    for (const auto& v : mesh.vertices) {
        sum += (pose_pred.apply(v) - pose_gt.apply(v)).norm();
    }
    return sum / static_cast<double>(mesh.vertices.size());
}

double adds_error(const TriangleMesh& mesh, const Pose& pose_gt, const Pose& pose_pred) {
    std::vector<Eigen::Vector3d> pred_pts;
    pred_pts.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) pred_pts.push_back(pose_pred.apply(v));
    const KdTree3 tree(std::move(pred_pts));
    double sum = 0.0;
    for (const auto& v : mesh.vertices) {
        sum += tree.nearest(pose_gt.apply(v)).distance;
    }
    return sum / static_cast<double>(mesh.vertices.size());
}

PoseErrorReport pose_errors(const TriangleMesh& mesh, const Pose& pose_gt,
                            const Pose& pose_pred) {
    PoseErrorReport report;
    report.add = add_error(mesh, pose_gt, pose_pred);
    report.adds = adds_error(mesh, pose_gt, pose_pred);
    report.rot_geodesic = rotation_geodesic(pose_gt.rotation, pose_pred.rotation);
    report.trans_l2 = (pose_gt.translation - pose_pred.translation).norm();
    return report;
}

double recall_at_threshold(std::span<const double> errors, double diameter, double fraction) {
    if (errors.empty()) throw DegenerateInputError("recall_at_threshold: empty error list");
    if (!(fraction > 0.0)) throw DomainError("recall_at_threshold: fraction must be > 0");
    const double limit = fraction * diameter;
    std::size_t hits = 0;
    for (double e : errors) hits += e < limit ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(errors.size());
}

double auc(std::span<const double> errors, double max_threshold) {
    if (errors.empty()) throw DegenerateInputError("auc: empty error list");
    if (!(max_threshold > 0.0)) throw DomainError("auc: max_threshold must be > 0");
    double sum = 0.0;
    for (double e : errors) {
        sum += std::max(0.0, 1.0 - e / max_threshold);
    }
    return sum / static_cast<double>(errors.size());
}

std::vector<CoordinateAccuracyRow> coordinate_accuracy(const CoordinateMap& pred,
                                                       const CoordinateMap& gt, double diameter,
                                                       const std::vector<double>& fractions) {
    if (pred.width != gt.width || pred.height != gt.height) {
        throw ShapeError("coordinate_accuracy: map dimensions differ");
    }
    if (!(diameter > 0.0)) throw DomainError("coordinate_accuracy: diameter must be > 0");

    std::vector<double> front_err, back_err;
    for (std::size_t i = 0; i < pred.mask.size(); ++i) {
        if (!pred.mask[i] || !gt.mask[i]) continue;
        front_err.push_back((pred.front[i] - gt.front[i]).norm());
        back_err.push_back((pred.back[i] - gt.back[i]).norm());
    }
    if (front_err.empty()) {
        throw DegenerateInputError("coordinate_accuracy: empty mask intersection");
    }

    std::vector<CoordinateAccuracyRow> rows;
    rows.reserve(fractions.size());
    for (double f : fractions) {
        CoordinateAccuracyRow row;
        row.fraction = f;
        const double limit = f * diameter;
        std::size_t front_ok = 0, back_ok = 0;
        for (double e : front_err) front_ok += e < limit ? 1 : 0;
        for (double e : back_err) back_ok += e < limit ? 1 : 0;
        row.front = static_cast<double>(front_ok) / static_cast<double>(front_err.size());
        row.back = static_cast<double>(back_ok) / static_cast<double>(back_err.size());
        rows.push_back(row);
    }
    return rows;
}

}  // namespace hcce
