#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace hcce {

/// Per-pixel object mask plus model-space coordinates of the front (first
/// ray hit) and back (last ray hit) surfaces. Row-major storage; coordinates
/// of unmasked pixels are quiet NaN.
struct CoordinateMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> mask;
    std::vector<Eigen::Vector3d> front;
    std::vector<Eigen::Vector3d> back;

    static CoordinateMap blank(int width, int height);

    int index(int x, int y) const { return y * width + x; }
    bool masked(int x, int y) const { return mask[static_cast<std::size_t>(index(x, y))] != 0; }

    /// Number of masked pixels.
    std::size_t mask_area() const;

    /// Checks dimensional consistency and that coordinates are finite exactly
    /// where the mask is set. Throws ShapeError / DomainError.
    void validate() const;
};

}  // namespace hcce
