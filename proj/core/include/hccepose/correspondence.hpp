#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hccepose/coordinate_map.hpp"

namespace hcce {

/// Which surface a correspondence record came from.
enum class SurfaceSource : std::uint8_t { Front = 0, Back = 1, Mid = 2 };

/// Correspondence construction modes: front only, back only, both surfaces,
/// or both surfaces plus uniform samples between them.
enum class CorrespondenceMode : std::uint8_t { Front, Back, BothSurfaces, UltraDense };

std::string_view mode_name(CorrespondenceMode mode);                  // "f", "b", "bf", "bfu"
CorrespondenceMode mode_from_name(std::string_view name);             // throws ParseError

struct CorrespondenceRecord {
    Eigen::Vector2d pixel;   // pixel-center image coordinates
    Eigen::Vector3d point;   // model space
    SurfaceSource source = SurfaceSource::Front;
    std::int32_t group = 0;  // row-major pixel index; records of one pixel share it

    friend bool operator==(const CorrespondenceRecord& a, const CorrespondenceRecord& b) {
        return a.pixel == b.pixel && a.point == b.point && a.source == b.source &&
               a.group == b.group;
    }
};

struct CorrespondenceSet {
    std::vector<CorrespondenceRecord> records;
    /// Interpolation spacing actually used; 0 when the mode needs none.
    double d_bar = 0.0;
};

/// Number of points to interpolate between two 3D coordinates:
/// floor(|q1 - q2| / d_bar). Throws DomainError for d_bar <= 0.
int interp_count(const Eigen::Vector3d& q1, const Eigen::Vector3d& q2, double d_bar);

/// n evenly spaced points strictly between q2 and q1:
/// a*q1 + (1-a)*q2 with a = t/(n+1), t = 1..n, ordered by increasing a.
std::vector<Eigen::Vector3d> sample_between(const Eigen::Vector3d& q1,
                                            const Eigen::Vector3d& q2, int n);

/// When the automatic mean nearest-neighbor spacing runs over more points
/// than this, the point set is thinned by a uniform stride first.
inline constexpr std::size_t kAutoSpacingMaxPoints = 20000;

/// Mean nearest-neighbor distance over the mode-relevant predicted points of
/// the map (front for mode f, back for mode b, their union otherwise),
/// subsampled to kAutoSpacingMaxPoints. Returns 0 for degenerate inputs
/// (fewer than 2 points, or all points coincident).
double auto_interpolation_spacing(const CoordinateMap& map, CorrespondenceMode mode);

/// Builds the correspondence set for a mode. Records are emitted in row-major
/// pixel order; per pixel: front, back, then mid points by increasing a, so
/// identical inputs produce identically ordered output. Pixels where front
/// and back coincide contribute a single front record in modes bf/bfu.
/// d_bar: interpolation spacing; std::nullopt computes it from the map.
/// An empty mask yields an empty set.
CorrespondenceSet build_correspondences(const CoordinateMap& map, CorrespondenceMode mode,
                                        std::optional<double> d_bar = std::nullopt);

}  // namespace hcce
