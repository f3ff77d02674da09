#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hccepose/camera.hpp"
#include "hccepose/coordinate_map.hpp"
#include "hccepose/correspondence.hpp"
#include "hccepose/loss.hpp"
#include "hccepose/mesh.hpp"
#include "hccepose/pnp.hpp"
#include "hccepose/pose.hpp"

namespace hcce {

/// Random pose model: rotations uniform over SO(3), translations uniform in
/// an axis-aligned box (meters).
struct PoseSamplerConfig {
    Eigen::Vector3d translation_min{-0.15, -0.15, 2.0};
    Eigen::Vector3d translation_max{0.15, 0.15, 2.8};
};

/// Synthetic stand-in for network prediction error: isotropic Gaussian noise
/// on both surfaces plus a fraction of pixels replaced by uniform samples in
/// a ball around the true coordinate. All magnitudes are fractions of the
/// object diameter.
struct NoiseModel {
    double coord_sigma = 0.0;
    double outlier_rate = 0.0;
    double outlier_scale = 0.0;

    void validate() const;
    bool enabled() const { return coord_sigma > 0.0 || outlier_rate > 0.0; }
};

struct ExperimentConfig {
    std::string mesh_path;
    CameraIntrinsics camera{160.0, 160.0, 64.5, 64.5, 128, 128};
    PoseSamplerConfig pose_sampler;
    NoiseModel noise;
    std::vector<CorrespondenceMode> modes{CorrespondenceMode::Front, CorrespondenceMode::Back,
                                          CorrespondenceMode::BothSurfaces,
                                          CorrespondenceMode::UltraDense};
    int scenes = 1;
    std::uint64_t seed = 0;
    int threads = 1;
    /// Interpolation spacing; nullopt derives it from each map.
    std::optional<double> d_bar;
    /// Score poses with ADD-S instead of ADD (for rotationally symmetric objects).
    bool symmetric = false;
    RansacConfig ransac;
    LossConfig loss;
    std::string out_dir = ".";
    bool write_svg = false;

    void validate() const;
};

/// Parses the JSON experiment configuration (see docs/config_schema.md).
/// Unknown keys are rejected. Throws ParseError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

/// Haar-uniform random rotation (normalized 4-Gaussian quaternion).
Eigen::Matrix3d sample_uniform_rotation(std::mt19937_64& rng);

struct Scene {
    Pose pose;
    CoordinateMap map;
};

/// Deterministic per (cfg.seed, scene_index): samples poses until the object
/// renders with a non-empty mask, giving up after 100 attempts with an
/// UnrenderableError.
Scene generate_scene(const TriangleMesh& mesh, const ExperimentConfig& cfg, int scene_index);

/// Applies the noise model; deterministic per seed; mask unchanged.
/// A disabled model returns the map verbatim.
CoordinateMap corrupt_map(const CoordinateMap& map, const NoiseModel& noise, double diameter,
                          std::uint64_t seed);

/// Noise sub-seed used by the harness for a given scene, so externally
/// rendered noisy maps line up with what run_ablation produces.
std::uint64_t scene_noise_seed(std::uint64_t master_seed, int scene_index);

struct SceneModeResult {
    bool failed = false;
    std::string error;
    double rot_err = 0.0;    // radians
    double trans_err = 0.0;  // meters
    double add_err = 0.0;    // meters (ADD or ADD-S per config)
    int inlier_count = 0;
};

struct SceneResult {
    int scene_index = 0;
    bool render_failed = false;
    std::string render_error;
    Pose pose_gt;
    std::vector<SceneModeResult> mode_results;  // aligned with cfg.modes
};

struct AblationRow {
    CorrespondenceMode mode = CorrespondenceMode::Front;
    int scenes = 0;
    int failures = 0;
    double rot_median = 0.0;
    double rot_mean = 0.0;
    double trans_median = 0.0;
    double trans_mean = 0.0;
    double add_recall = 0.0;  // at 0.1 * diameter
    double add_auc = 0.0;     // max threshold 0.10 m
};

struct AblationReport {
    std::vector<AblationRow> rows;            // aligned with cfg.modes
    std::vector<SceneResult> scene_results;   // ordered by scene index
    double diameter = 0.0;
};

/// Full harness: render, corrupt, build each mode's correspondences, solve,
/// score. Per-scene failures are recorded, never fatal. Scenes may run in
/// parallel; output is identical for any thread count.
AblationReport run_ablation(const TriangleMesh& mesh, const ExperimentConfig& cfg);
AblationReport run_ablation(const ExperimentConfig& cfg);

void write_ablation_csv(const AblationReport& report, const ExperimentConfig& cfg,
                        const std::string& path);
void write_ablation_json(const AblationReport& report, const ExperimentConfig& cfg,
                         const std::string& path);

/// Recall-vs-threshold curve for one mode's pose errors, as a standalone SVG.
void write_recall_svg(const std::vector<double>& errors, double diameter,
                      const std::string& title, const std::string& path);

}  // namespace hcce
