#include "hccepose/raycast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hccepose/parallel.hpp"

namespace hcce {

namespace {

// Intersection tolerances: near-parallel rays are rejected on the determinant,
// hits closer than kMinHit are discarded, and barycentric tests carry a tiny
// slack so rays through shared edges register on at least one triangle.
constexpr double kParallelEps = 1e-9;
constexpr double kMinHit = 1e-6;
constexpr double kBarySlack = 1e-12;
constexpr int kTileShift = 3;  // 8x8 pixel tiles

struct TriangleData {
    Eigen::Vector3d a;   // camera space
    Eigen::Vector3d e1;
    Eigen::Vector3d e2;
    int index;
};

struct Hit {
    double t = 0.0;
    double u = 0.0;
    double v = 0.0;
};

bool intersect(const Eigen::Vector3d& dir, const TriangleData& tri, Hit& hit) {
    const Eigen::Vector3d p = dir.cross(tri.e2);
    const double det = tri.e1.dot(p);
    if (std::abs(det) < kParallelEps) return false;
    const double inv = 1.0 / det;
    const Eigen::Vector3d s = -tri.a;  // ray origin is the camera center
    const double u = s.dot(p) * inv;
    if (u < -kBarySlack || u > 1.0 + kBarySlack) return false;
    const Eigen::Vector3d q = s.cross(tri.e1);
    const double v = dir.dot(q) * inv;
    if (v < -kBarySlack || u + v > 1.0 + kBarySlack) return false;
    const double t = tri.e2.dot(q) * inv;
    if (t < kMinHit) return false;
    hit = {t, u, v};
    return true;
}

}  // namespace

CoordinateMap raycast_front_back(const TriangleMesh& mesh, const Pose& pose,
                                 const CameraIntrinsics& k, int threads) {
    k.validate();
    CoordinateMap map = CoordinateMap::blank(k.width, k.height);

    std::vector<Eigen::Vector3d> cam_vertices(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        cam_vertices[i] = pose.apply(mesh.vertices[i]);
    }

    std::vector<TriangleData> tris;
    tris.reserve(mesh.triangles.size());

    // Conservative screen-space binning: each triangle lands in every tile its
    // projected bounding box touches. Lists keep triangle index order so the
    // per-pixel scan is deterministic.
    const int tiles_x = (k.width + (1 << kTileShift) - 1) >> kTileShift;
    const int tiles_y = (k.height + (1 << kTileShift) - 1) >> kTileShift;
    std::vector<std::vector<int>> tile_tris(static_cast<std::size_t>(tiles_x) * tiles_y);

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Eigen::Vector3d& a = cam_vertices[tri[0]];
        const Eigen::Vector3d& b = cam_vertices[tri[1]];
        const Eigen::Vector3d& c = cam_vertices[tri[2]];
        if (a.z() <= kMinHit && b.z() <= kMinHit && c.z() <= kMinHit) continue;

        int u_lo = 0, u_hi = k.width - 1, v_lo = 0, v_hi = k.height - 1;
        if (a.z() > kMinHit && b.z() > kMinHit && c.z() > kMinHit) {
            double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
            double y0 = x0, y1 = -x0;
            for (const Eigen::Vector3d* p : {&a, &b, &c}) {
                const double px = k.fx * p->x() / p->z() + k.cx;
                const double py = k.fy * p->y() / p->z() + k.cy;
                x0 = std::min(x0, px); x1 = std::max(x1, px);
                y0 = std::min(y0, py); y1 = std::max(y1, py);
            }
            // Pixel u sees image coordinate u + 0.5.
            u_lo = std::max(u_lo, static_cast<int>(std::ceil(x0 - 0.5 - 1e-9)));
            u_hi = std::min(u_hi, static_cast<int>(std::floor(x1 - 0.5 + 1e-9)));
            v_lo = std::max(v_lo, static_cast<int>(std::ceil(y0 - 0.5 - 1e-9)));
            v_hi = std::min(v_hi, static_cast<int>(std::floor(y1 - 0.5 + 1e-9)));
            if (u_lo > u_hi || v_lo > v_hi) continue;
        }
        // Triangles crossing the image plane keep the full viewport.

        const int data_index = static_cast<int>(tris.size());
        tris.push_back({a, b - a, c - a, static_cast<int>(t)});
        for (int ty = v_lo >> kTileShift; ty <= v_hi >> kTileShift; ++ty) {
            for (int tx = u_lo >> kTileShift; tx <= u_hi >> kTileShift; ++tx) {
                tile_tris[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(data_index);
            }
        }
    }

    parallel_for(static_cast<std::size_t>(k.height), threads, [&](std::size_t row) {
        const int v = static_cast<int>(row);
        for (int u = 0; u < k.width; ++u) {
            const auto& candidates =
                tile_tris[static_cast<std::size_t>(v >> kTileShift) * tiles_x + (u >> kTileShift)];
            if (candidates.empty()) continue;
            const Eigen::Vector3d dir = pixel_ray_direction(u, v, k);

            double t_front = std::numeric_limits<double>::infinity();
            double t_back = -std::numeric_limits<double>::infinity();
            Hit front_hit, back_hit;
            int front_tri = -1, back_tri = -1;

            for (int ci : candidates) {
                Hit hit;
                if (!intersect(dir, tris[ci], hit)) continue;
                if (hit.t < t_front) {
                    t_front = hit.t;
                    front_hit = hit;
                    front_tri = tris[ci].index;
                }
                if (hit.t > t_back) {
                    t_back = hit.t;
                    back_hit = hit;
                    back_tri = tris[ci].index;
                }
            }
            if (front_tri < 0) continue;

            const int px = map.index(u, v);
            map.mask[px] = 1;
            const auto model_point = [&](int tri_index, const Hit& h) {
                const auto& tri = mesh.triangles[tri_index];
                return Eigen::Vector3d((1.0 - h.u - h.v) * mesh.vertices[tri[0]] +
                                       h.u * mesh.vertices[tri[1]] +
                                       h.v * mesh.vertices[tri[2]]);
            };
            map.front[px] = model_point(front_tri, front_hit);
            map.back[px] = model_point(back_tri, back_hit);
        }
    });

    return map;
}

}  // namespace hcce
