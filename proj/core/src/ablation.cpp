#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "hccepose/errors.hpp"
#include "hccepose/experiment.hpp"
#include "hccepose/metrics.hpp"
#include "hccepose/parallel.hpp"
#include "hccepose/rng.hpp"

namespace hcce {

namespace {

constexpr std::uint64_t kNoiseSceneSalt = 0x434f5252ULL;
constexpr std::uint64_t kRansacSceneSalt = 0x504e5052ULL;

}  // namespace

std::uint64_t scene_noise_seed(std::uint64_t master_seed, int scene_index) {
    return derive_seed(master_seed, kNoiseSceneSalt, static_cast<std::uint64_t>(scene_index));
}

namespace {

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

nlohmann::json pose_to_json(const Pose& pose) {
    nlohmann::json j;
    std::vector<double> r(9);
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) r[static_cast<std::size_t>(3 * row + col)] = pose.rotation(row, col);
    }
    j["rotation_row_major"] = r;
    j["translation"] = {pose.translation.x(), pose.translation.y(), pose.translation.z()};
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (mesh_path.empty()) throw DomainError("ExperimentConfig: mesh path is empty");
    camera.validate();
    noise.validate();
    if (modes.empty()) throw DomainError("ExperimentConfig: modes must be non-empty");
    if (scenes < 1) throw DomainError("ExperimentConfig: scenes must be >= 1");
    if (threads < 1) throw DomainError("ExperimentConfig: threads must be >= 1");
    if (d_bar && !(*d_bar > 0.0)) throw DomainError("ExperimentConfig: d_bar must be > 0");
    for (int i = 0; i < 3; ++i) {
        if (pose_sampler.translation_min[i] > pose_sampler.translation_max[i]) {
            throw DomainError("ExperimentConfig: translation box is inverted");
        }
    }
    ransac.validate();
    loss.validate();
}

AblationReport run_ablation(const TriangleMesh& mesh, const ExperimentConfig& cfg) {
    cfg.validate();
    AblationReport report;
    report.diameter = mesh.diameter;
    report.scene_results.resize(static_cast<std::size_t>(cfg.scenes));

    parallel_for(static_cast<std::size_t>(cfg.scenes), cfg.threads, [&](std::size_t si) {
        SceneResult& result = report.scene_results[si];
        result.scene_index = static_cast<int>(si);
        result.mode_results.resize(cfg.modes.size());

        Scene scene;
        try {
            scene = generate_scene(mesh, cfg, static_cast<int>(si));
        } catch (const Error& e) {
            result.render_failed = true;
            result.render_error = e.what();
            for (auto& mr : result.mode_results) {
                mr.failed = true;
                mr.error = "scene unavailable";
            }
            return;
        }
        result.pose_gt = scene.pose;
        const CoordinateMap noisy = corrupt_map(scene.map, cfg.noise, mesh.diameter,
                                                scene_noise_seed(cfg.seed, static_cast<int>(si)));

        for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
            SceneModeResult& mr = result.mode_results[mi];
            try {
                const CorrespondenceSet set =
                    build_correspondences(noisy, cfg.modes[mi], cfg.d_bar);
                RansacConfig rcfg = cfg.ransac;
                rcfg.seed = derive_seed(derive_seed(cfg.seed, kRansacSceneSalt, si), mi);
                rcfg.threads = 1;  // scenes already run in parallel
                const PoseEstimate est = ransac_pnp(set, cfg.camera, rcfg);
                const PoseErrorReport errors = pose_errors(mesh, scene.pose, est.pose);
                mr.rot_err = errors.rot_geodesic;
                mr.trans_err = errors.trans_l2;
                mr.add_err = cfg.symmetric ? errors.adds : errors.add;
                mr.inlier_count = est.inlier_count;
            } catch (const Error& e) {
                mr.failed = true;
                mr.error = e.what();
            }
        }
    });

    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
        AblationRow row;
        row.mode = cfg.modes[mi];
        row.scenes = cfg.scenes;
        std::vector<double> rot, trans, add;
        for (const auto& sr : report.scene_results) {
            const SceneModeResult& mr = sr.mode_results[mi];
            if (mr.failed) {
                ++row.failures;
                continue;
            }
            rot.push_back(mr.rot_err);
            trans.push_back(mr.trans_err);
            add.push_back(mr.add_err);
        }
        row.rot_median = median(rot);
        row.rot_mean = mean(rot);
        row.trans_median = median(trans);
        row.trans_mean = mean(trans);
        if (!add.empty()) {
            row.add_recall = recall_at_threshold(add, mesh.diameter, 0.1);
            row.add_auc = auc(add, 0.10);
        } else {
            row.add_recall = std::numeric_limits<double>::quiet_NaN();
            row.add_auc = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(row);
    }
    return report;
}

AblationReport run_ablation(const ExperimentConfig& cfg) {
    const TriangleMesh mesh = load_mesh(cfg.mesh_path);
    return run_ablation(mesh, cfg);
}

void write_ablation_csv(const AblationReport& report, const ExperimentConfig& cfg,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "mode,scenes,failures,rot_median_rad,rot_mean_rad,trans_median_m,trans_mean_m,"
           "add_recall_0.1d,add_auc_10cm\n";
    (void)cfg;
    for (const auto& row : report.rows) {
        out << mode_name(row.mode) << ',' << row.scenes << ',' << row.failures << ','
            << fmt(row.rot_median) << ',' << fmt(row.rot_mean) << ',' << fmt(row.trans_median)
            << ',' << fmt(row.trans_mean) << ',' << fmt(row.add_recall) << ','
            << fmt(row.add_auc) << '\n';
    }
}

void write_ablation_json(const AblationReport& report, const ExperimentConfig& cfg,
                         const std::string& path) {
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(experiment_config_to_json(cfg));
    j["diameter"] = report.diameter;
    j["pose_metric"] = cfg.symmetric ? "ADD-S" : "ADD";

    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json r;
        r["mode"] = std::string(mode_name(row.mode));
        r["scenes"] = row.scenes;
        r["failures"] = row.failures;
        r["rot_median_rad"] = row.rot_median;
        r["rot_mean_rad"] = row.rot_mean;
        r["trans_median_m"] = row.trans_median;
        r["trans_mean_m"] = row.trans_mean;
        r["add_recall_0.1d"] = row.add_recall;
        r["add_auc_10cm"] = row.add_auc;
        rows.push_back(r);
    }
    j["aggregates"] = rows;

    nlohmann::json scenes = nlohmann::json::array();
    for (const auto& sr : report.scene_results) {
        nlohmann::json s;
        s["index"] = sr.scene_index;
        if (sr.render_failed) {
            s["render_error"] = sr.render_error;
        } else {
            s["pose_gt"] = pose_to_json(sr.pose_gt);
        }
        nlohmann::json modes;
        for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
            const SceneModeResult& mr = sr.mode_results[mi];
            nlohmann::json m;
            m["failed"] = mr.failed;
            if (mr.failed) {
                m["error"] = mr.error;
            } else {
                m["rot_err_rad"] = mr.rot_err;
                m["trans_err_m"] = mr.trans_err;
                m["add_err_m"] = mr.add_err;
                m["inliers"] = mr.inlier_count;
            }
            modes[std::string(mode_name(cfg.modes[mi]))] = m;
        }
        s["modes"] = modes;
        scenes.push_back(s);
    }
    j["scenes"] = scenes;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace hcce
