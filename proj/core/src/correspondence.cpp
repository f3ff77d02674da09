#include "hccepose/correspondence.hpp"

#include <cmath>
#include <string>

#include "hccepose/errors.hpp"
#include "hccepose/kdtree.hpp"

namespace hcce {

std::string_view mode_name(CorrespondenceMode mode) {
    switch (mode) {
        case CorrespondenceMode::Front: return "f";
        case CorrespondenceMode::Back: return "b";
        case CorrespondenceMode::BothSurfaces: return "bf";
        case CorrespondenceMode::UltraDense: return "bfu";
    }
    return "?";
}

CorrespondenceMode mode_from_name(std::string_view name) {
    if (name == "f") return CorrespondenceMode::Front;
    if (name == "b") return CorrespondenceMode::Back;
    if (name == "bf") return CorrespondenceMode::BothSurfaces;
    if (name == "bfu") return CorrespondenceMode::UltraDense;
    throw ParseError("unknown correspondence mode '" + std::string(name) +
                     "' (expected f, b, bf or bfu)");
}

int interp_count(const Eigen::Vector3d& q1, const Eigen::Vector3d& q2, double d_bar) {
    if (!(d_bar > 0.0)) {
        throw DomainError("interp_count: spacing must be positive, got " + std::to_string(d_bar));
    }
    return static_cast<int>(std::floor((q1 - q2).norm() / d_bar));
}

std::vector<Eigen::Vector3d> sample_between(const Eigen::Vector3d& q1,
                                            const Eigen::Vector3d& q2, int n) {
    std::vector<Eigen::Vector3d> points;
    if (n <= 0) return points;
    points.reserve(static_cast<std::size_t>(n));
    for (int t = 1; t <= n; ++t) {
        const double a = static_cast<double>(t) / static_cast<double>(n + 1);
        points.emplace_back(a * q1 + (1.0 - a) * q2);
    }
    return points;
}

double auto_interpolation_spacing(const CoordinateMap& map, CorrespondenceMode mode) {
    const bool use_front = mode != CorrespondenceMode::Back;
    const bool use_back = mode != CorrespondenceMode::Front;
    std::vector<Eigen::Vector3d> points;
    points.reserve(2 * map.mask_area());
    for (std::size_t i = 0; i < map.mask.size(); ++i) {
        if (!map.mask[i]) continue;
        if (use_front) points.push_back(map.front[i]);
        if (use_back) points.push_back(map.back[i]);
    }
    if (points.size() > kAutoSpacingMaxPoints) {
        const std::size_t stride =
            (points.size() + kAutoSpacingMaxPoints - 1) / kAutoSpacingMaxPoints;
        std::vector<Eigen::Vector3d> thinned;
        thinned.reserve(points.size() / stride + 1);
        for (std::size_t i = 0; i < points.size(); i += stride) thinned.push_back(points[i]);
        points.swap(thinned);
    }
    if (points.size() < 2) return 0.0;
    return avg_nn_distance(points);
}

CorrespondenceSet build_correspondences(const CoordinateMap& map, CorrespondenceMode mode,
                                        std::optional<double> d_bar) {
    map.validate();
    if (d_bar && !(*d_bar > 0.0)) {
        throw DomainError("build_correspondences: explicit spacing must be positive");
    }

    CorrespondenceSet set;
    const bool want_front = mode != CorrespondenceMode::Back;
    const bool want_back = mode != CorrespondenceMode::Front;
    const bool want_mid = mode == CorrespondenceMode::UltraDense;

    double spacing = 0.0;
    if (want_mid) {
        spacing = d_bar ? *d_bar : auto_interpolation_spacing(map, mode);
        // All points coincident leaves no usable spacing; fall back to no
        // interpolation rather than failing the whole set.
        set.d_bar = spacing;
    }

    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const int px = map.index(x, y);
            if (!map.mask[px]) continue;
            const Eigen::Vector2d pixel(static_cast<double>(x) + 0.5,
                                        static_cast<double>(y) + 0.5);
            const Eigen::Vector3d& front = map.front[px];
            const Eigen::Vector3d& back = map.back[px];
            const bool degenerate = front == back;

            if (want_front) {
                set.records.push_back({pixel, front, SurfaceSource::Front, px});
            }
            if (want_back) {
                if (degenerate && want_front) {
                    // Grazing silhouette: front and back coincide; one record.
                } else {
                    set.records.push_back({pixel, back, SurfaceSource::Back, px});
                }
            }
            if (want_mid && !degenerate && spacing > 0.0) {
                const int n = interp_count(front, back, spacing);
                for (const Eigen::Vector3d& q : sample_between(front, back, n)) {
                    set.records.push_back({pixel, q, SurfaceSource::Mid, px});
                }
            }
        }
    }
    return set;
}

}  // namespace hcce
