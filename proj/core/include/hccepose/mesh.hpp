#pragma once

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

#include "hccepose/codec.hpp"

namespace hcce {

/// Indexed triangle mesh in model space (meters).
struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> triangles;
    /// Maximum pairwise vertex distance.
    double diameter = 0.0;
    /// Tight axis-aligned bounds; extents are floored at a tiny epsilon so
    /// flat meshes still yield a usable normalizer.
    BoundingNormalizer bounds;

    /// Builds a mesh from raw data, computing diameter and bounds and
    /// validating indices. Throws DegenerateInputError for empty geometry.
    static TriangleMesh from_data(std::vector<Eigen::Vector3d> vertices,
                                  std::vector<std::array<int, 3>> triangles);
};

/// Loads an ASCII OBJ (v/f records, 1-based indices, polygons fanned into
/// triangles) or ASCII PLY file, chosen by extension with a content sniff as
/// fallback. Throws ParseError with file:line context on malformed input and
/// DegenerateInputError when no faces survive.
TriangleMesh load_mesh(const std::string& path);

}  // namespace hcce
