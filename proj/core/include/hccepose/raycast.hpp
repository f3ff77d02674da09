#pragma once

#include "hccepose/camera.hpp"
#include "hccepose/coordinate_map.hpp"
#include "hccepose/mesh.hpp"
#include "hccepose/pose.hpp"

namespace hcce {

/// Renders per-pixel front (minimum depth) and back (maximum depth) surface
/// coordinate maps by casting one ray through each pixel center. Back faces
/// are not culled; a pixel whose ray grazes a silhouette may legitimately get
/// front == back. Output is identical for any thread count.
CoordinateMap raycast_front_back(const TriangleMesh& mesh, const Pose& pose,
                                 const CameraIntrinsics& k, int threads = 1);

}  // namespace hcce
