#include "hccepose/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hccepose/errors.hpp"

namespace hcce {

namespace {
constexpr int kLeafSize = 8;
}

KdTree3::KdTree3(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) {
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<int>(points_.size()));
    }
}

int KdTree3::build(int begin, int end) {
    const int node_index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    if (end - begin <= kLeafSize) {
        nodes_[node_index].begin = begin;
        nodes_[node_index].end = end;
        return node_index;
    }
    Eigen::Vector3d lo = points_[order_[begin]];
    Eigen::Vector3d hi = lo;
    for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    const int mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    const double split = points_[order_[mid]][axis];

    const int left = build(begin, mid);
    const int right = build(mid, end);
    nodes_[node_index].axis = axis;
    nodes_[node_index].split = split;
    nodes_[node_index].left = left;
    nodes_[node_index].right = right;
    return node_index;
}

void KdTree3::search(int node_index, const Eigen::Vector3d& query, int exclude_index,
                     double& best_sq, int& best_index) const {
    const Node& node = nodes_[node_index];
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            const int p = order_[i];
            if (p == exclude_index) continue;
            const double d = (points_[p] - query).squaredNorm();
            if (d < best_sq) {
                best_sq = d;
                best_index = p;
            }
        }
        return;
    }
    const double delta = query[node.axis] - node.split;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query, exclude_index, best_sq, best_index);
    if (delta * delta < best_sq) {
        search(far, query, exclude_index, best_sq, best_index);
    }
}

KdTree3::Result KdTree3::nearest(const Eigen::Vector3d& query, int exclude_index) const {
    if (points_.empty() || (points_.size() == 1 && exclude_index == 0)) {
        throw DegenerateInputError("KdTree3::nearest: no candidate points");
    }
    double best_sq = std::numeric_limits<double>::infinity();
    int best_index = -1;
    search(root_, query, exclude_index, best_sq, best_index);
    return {best_index, std::sqrt(best_sq)};
}

double avg_nn_distance(std::span<const Eigen::Vector3d> points) {
    if (points.size() < 2) {
        throw DegenerateInputError("avg_nn_distance: need at least 2 points, got " +
                                   std::to_string(points.size()));
    }
    KdTree3 tree(std::vector<Eigen::Vector3d>(points.begin(), points.end()));
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sum += tree.nearest(points[i], static_cast<int>(i)).distance;
    }
    return sum / static_cast<double>(points.size());
}

}  // namespace hcce
