#include <Eigen/Geometry>

#include "hccepose/errors.hpp"
#include "hccepose/experiment.hpp"
#include "hccepose/raycast.hpp"
#include "hccepose/rng.hpp"

namespace hcce {

namespace {
constexpr std::uint64_t kSceneSalt = 0x5343454eULL;
constexpr int kMaxPoseAttempts = 100;
}  // namespace

Eigen::Matrix3d sample_uniform_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    q.normalize();
    return q.toRotationMatrix();
}

Scene generate_scene(const TriangleMesh& mesh, const ExperimentConfig& cfg, int scene_index) {
    std::mt19937_64 rng(derive_seed(cfg.seed, kSceneSalt, static_cast<std::uint64_t>(scene_index)));
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int attempt = 0; attempt < kMaxPoseAttempts; ++attempt) {
        Scene scene;
        scene.pose.rotation = sample_uniform_rotation(rng);
        for (int i = 0; i < 3; ++i) {
            const double lo = cfg.pose_sampler.translation_min[i];
            const double hi = cfg.pose_sampler.translation_max[i];
            scene.pose.translation[i] = lo + (hi - lo) * unit(rng);
        }
        scene.map = raycast_front_back(mesh, scene.pose, cfg.camera, 1);
        if (scene.map.mask_area() > 0) return scene;
    }
    throw UnrenderableError("generate_scene: no visible pose in " +
                            std::to_string(kMaxPoseAttempts) + " attempts for scene " +
                            std::to_string(scene_index));
}

}  // namespace hcce
