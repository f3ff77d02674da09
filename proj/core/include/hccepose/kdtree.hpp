#pragma once

#include <Eigen/Core>

#include <limits>
#include <span>
#include <vector>

namespace hcce {

/// Static k-d tree over 3D points for exact nearest-neighbor queries.
/// Immutable after construction; queries are const and thread-safe.
class KdTree3 {
public:
    KdTree3() = default;
    explicit KdTree3(std::vector<Eigen::Vector3d> points);

    struct Result {
        int index = -1;
        double distance = std::numeric_limits<double>::infinity();
    };

    /// Nearest stored point to `query`, optionally excluding one index
    /// (used when the query is itself a stored point).
    /// Throws DegenerateInputError when no candidate exists.
    Result nearest(const Eigen::Vector3d& query, int exclude_index = -1) const;

    std::size_t size() const { return points_.size(); }
    const std::vector<Eigen::Vector3d>& points() const { return points_; }

private:
    struct Node {
        double split = 0.0;
        int axis = -1;       // -1 marks a leaf
        int left = -1;
        int right = -1;
        int begin = 0;       // leaf range into order_
        int end = 0;
    };

    int build(int begin, int end);
    void search(int node, const Eigen::Vector3d& query, int exclude_index,
                double& best_sq, int& best_index) const;

    std::vector<Eigen::Vector3d> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

/// Mean distance from each point to its nearest neighbor (self excluded).
/// Throws DegenerateInputError for fewer than 2 points.
double avg_nn_distance(std::span<const Eigen::Vector3d> points);

}  // namespace hcce
