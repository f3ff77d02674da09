// hcce: command-line front end for the HCCE pose estimation library.
//
// Subcommands:
//   codec-inspect <x>          print the hierarchical codes of one component
//   render <config.json>       render clean (and noisy) coordinate maps
//   ablate <config.json>       run the f/b/bf/bfu ablation harness
//   loss-demo <schedule.json>  print weight trajectories for an error-rate schedule
//   eval <pred> <gt>           coordinate accuracy between two CMAP files

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hccepose/cmap_io.hpp"
#include "hccepose/codec.hpp"
#include "hccepose/experiment.hpp"
#include "hccepose/loss.hpp"
#include "hccepose/metrics.hpp"
#include "hccepose/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;

    void apply(hcce::ExperimentConfig& cfg) const {
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.out_dir = *out_dir;
        if (threads) cfg.threads = *threads;
    }
};

void add_overrides(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--seed", ov.seed, "Override the config seed");
    cmd->add_option("--out-dir", ov.out_dir, "Override the config output directory");
    cmd->add_option("--threads", ov.threads, "Override the config thread count");
}

int run_codec_inspect(double x) {
    const hcce::HierarchicalCodec codec;
    const auto continuous = codec.hcce_encode(x);
    const auto direct = codec.hbce_encode(x);
    const auto converted = codec.to_binary(continuous);
    const double decoded = codec.decode(converted);
    const double decoded_mid = codec.decode(converted, true);

    std::printf("x = %.17g\n", x);
    std::printf("level  hcce                 hbce  converted\n");
    for (int i = 0; i < codec.levels(); ++i) {
        std::printf("%5d  %-19.17g  %4d  %9d\n", i + 1, continuous.levels[i],
                    static_cast<int>(direct.bits[i]), static_cast<int>(converted.bits[i]));
    }
    std::printf("decoded (bin floor): %.17g\n", decoded);
    std::printf("decoded (midpoint):  %.17g\n", decoded_mid);
    std::printf("round-trip error:    %.17g\n", std::abs(decoded - x));
    return 0;
}

json pose_json(const hcce::Pose& pose) {
    std::vector<double> r(9);
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) r[static_cast<std::size_t>(3 * row + col)] = pose.rotation(row, col);
    }
    return json{{"rotation_row_major", r},
                {"translation", {pose.translation.x(), pose.translation.y(), pose.translation.z()}}};
}

int run_render(const std::string& config_path, const Overrides& ov) {
    hcce::ExperimentConfig cfg = hcce::load_experiment_config(config_path);
    ov.apply(cfg);
    const hcce::TriangleMesh mesh = hcce::load_mesh(cfg.mesh_path);
    fs::create_directories(cfg.out_dir);

    std::vector<hcce::Scene> scenes(static_cast<std::size_t>(cfg.scenes));
    hcce::parallel_for(scenes.size(), cfg.threads, [&](std::size_t i) {
        scenes[i] = hcce::generate_scene(mesh, cfg, static_cast<int>(i));
    });

    json index;
    index["mesh"] = cfg.mesh_path;
    index["diameter"] = mesh.diameter;
    index["camera"] = json::parse(hcce::experiment_config_to_json(cfg))["camera"];
    index["seed"] = cfg.seed;
    json scene_list = json::array();
    char name[64];
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        std::snprintf(name, sizeof(name), "scene_%04zu.cmap", i);
        hcce::save_coordinate_map(scenes[i].map, (fs::path(cfg.out_dir) / name).string());
        json entry;
        entry["index"] = i;
        entry["map"] = name;
        entry["pose"] = pose_json(scenes[i].pose);
        entry["mask_area"] = scenes[i].map.mask_area();
        if (cfg.noise.enabled()) {
            std::snprintf(name, sizeof(name), "scene_%04zu_noisy.cmap", i);
            const auto noisy =
                hcce::corrupt_map(scenes[i].map, cfg.noise, mesh.diameter,
                                  hcce::scene_noise_seed(cfg.seed, static_cast<int>(i)));
            hcce::save_coordinate_map(noisy, (fs::path(cfg.out_dir) / name).string());
            entry["noisy_map"] = name;
        }
        scene_list.push_back(entry);
    }
    index["scenes"] = scene_list;
    std::ofstream out(fs::path(cfg.out_dir) / "scenes.json", std::ios::binary);
    out << index.dump(2) << '\n';
    std::printf("rendered %d scene(s) into %s\n", cfg.scenes, cfg.out_dir.c_str());
    return 0;
}

int run_ablate(const std::string& config_path, const Overrides& ov, bool svg_flag) {
    hcce::ExperimentConfig cfg = hcce::load_experiment_config(config_path);
    ov.apply(cfg);
    if (svg_flag) cfg.write_svg = true;
    const hcce::TriangleMesh mesh = hcce::load_mesh(cfg.mesh_path);
    fs::create_directories(cfg.out_dir);

    const hcce::AblationReport report = hcce::run_ablation(mesh, cfg);
    const fs::path dir(cfg.out_dir);
    hcce::write_ablation_csv(report, cfg, (dir / "ablation.csv").string());
    hcce::write_ablation_json(report, cfg, (dir / "ablation.json").string());

    std::printf("%-4s %7s %9s %14s %14s %12s %8s\n", "mode", "scenes", "failures",
                "rot_median_rad", "trans_median_m", "add_recall", "auc");
    for (std::size_t mi = 0; mi < report.rows.size(); ++mi) {
        const auto& row = report.rows[mi];
        std::printf("%-4s %7d %9d %14.6g %14.6g %12.4f %8.4f\n",
                    std::string(hcce::mode_name(row.mode)).c_str(), row.scenes, row.failures,
                    row.rot_median, row.trans_median, row.add_recall, row.add_auc);
        if (cfg.write_svg) {
            std::vector<double> add_errors;
            for (const auto& sr : report.scene_results) {
                const auto& mr = sr.mode_results[mi];
                if (!mr.failed) add_errors.push_back(mr.add_err);
            }
            if (!add_errors.empty()) {
                const std::string name =
                    "ablation_" + std::string(hcce::mode_name(row.mode)) + ".svg";
                hcce::write_recall_svg(add_errors, report.diameter,
                                       std::string(hcce::mode_name(row.mode)) + " recall",
                                       (dir / name).string());
            }
        }
    }
    std::printf("wrote %s and %s\n", (dir / "ablation.csv").c_str(),
                (dir / "ablation.json").c_str());
    return 0;
}

// Error-rate schedule for the loss demo: either explicit per-epoch rates or
// the parametric decay r_i(e) = 0.5 * exp(-e / (tau * 2^(i-1))), which starts
// at chance level and is learned sooner at lower levels.
int run_loss_demo(const std::string& schedule_path) {
    std::ifstream in(schedule_path);
    if (!in) throw hcce::IoError("cannot open schedule '" + schedule_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::exception& e) {
        throw hcce::ParseError(std::string("schedule: invalid JSON: ") + e.what());
    }

    const double sigma = j.value("sigma", 4.0);
    const int levels = j.value("levels", 8);
    if (levels < 1 || levels > hcce::kMaxCodeLevels) {
        throw hcce::ParseError("schedule: levels must be in [1, 8]");
    }

    std::vector<std::vector<double>> rates;
    if (j.contains("rates")) {
        for (const auto& row : j["rates"]) {
            std::vector<double> r = row.get<std::vector<double>>();
            if (static_cast<int>(r.size()) != levels) {
                throw hcce::ParseError("schedule: each rates row needs one value per level");
            }
            rates.push_back(std::move(r));
        }
    } else {
        const int epochs = j.value("epochs", 40);
        const double tau = j.value("tau", 6.0);
        for (int e = 0; e < epochs; ++e) {
            std::vector<double> r(static_cast<std::size_t>(levels));
            for (int i = 0; i < levels; ++i) {
                r[static_cast<std::size_t>(i)] =
                    0.5 * std::exp(-static_cast<double>(e) / (tau * std::pow(2.0, i)));
            }
            rates.push_back(std::move(r));
        }
    }

    std::printf("epoch");
    for (int i = 1; i <= levels; ++i) std::printf(",w%d", i);
    std::printf("\n");
    for (std::size_t e = 0; e < rates.size(); ++e) {
        std::vector<double> intensities(rates[e].size());
        for (std::size_t i = 0; i < rates[e].size(); ++i) {
            intensities[i] = hcce::histogram_intensity(rates[e][i], sigma);
        }
        const auto weights = hcce::level_weights(intensities);
        std::printf("%zu", e);
        for (double w : weights) std::printf(",%.6f", w);
        std::printf("\n");
    }
    return 0;
}

int run_eval(const std::string& pred_path, const std::string& gt_path,
             const std::optional<std::string>& mesh_path,
             const std::optional<double>& diameter_opt) {
    double diameter = 0.0;
    if (diameter_opt) {
        diameter = *diameter_opt;
    } else if (mesh_path) {
        diameter = hcce::load_mesh(*mesh_path).diameter;
    } else {
        throw hcce::DomainError("eval: pass --mesh or --diameter");
    }

    const hcce::CoordinateMap pred = hcce::load_coordinate_map(pred_path);
    const hcce::CoordinateMap gt = hcce::load_coordinate_map(gt_path);
    const auto rows = hcce::coordinate_accuracy(pred, gt, diameter);

    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.mask.size(); ++i) {
        const bool a = pred.mask[i] != 0, b = gt.mask[i] != 0;
        inter += (a && b) ? 1 : 0;
        uni += (a || b) ? 1 : 0;
    }

    std::printf("diameter: %.17g m\n", diameter);
    std::printf("mask IoU: %.6f (%zu / %zu pixels)\n",
                uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0, inter, uni);
    std::printf("%-10s %10s %10s\n", "threshold", "front", "back");
    for (const auto& row : rows) {
        std::printf("%8.0f%% %10.6f %10.6f\n", row.fraction * 100.0, row.front, row.back);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HCCE-based 6D pose estimation experiments"};
    app.require_subcommand(1);

    double inspect_x = 0.0;
    auto* inspect = app.add_subcommand("codec-inspect",
                                       "Print hierarchical codes for a component in [0,1]");
    inspect->add_option("x", inspect_x, "Component value in [0, 1]")->required();

    std::string render_config;
    Overrides render_ov;
    auto* render = app.add_subcommand("render", "Render synthetic coordinate maps");
    render->add_option("config", render_config, "Experiment config JSON")->required();
    add_overrides(render, render_ov);

    std::string ablate_config;
    Overrides ablate_ov;
    bool ablate_svg = false;
    auto* ablate = app.add_subcommand("ablate", "Run the correspondence-mode ablation");
    ablate->add_option("config", ablate_config, "Experiment config JSON")->required();
    ablate->add_flag("--svg", ablate_svg, "Also write per-mode recall curves as SVG");
    add_overrides(ablate, ablate_ov);

    std::string schedule_path;
    auto* loss_demo = app.add_subcommand("loss-demo",
                                         "Print level-weight trajectories for a schedule");
    loss_demo->add_option("schedule", schedule_path, "Schedule JSON")->required();

    std::string eval_pred, eval_gt;
    std::optional<std::string> eval_mesh;
    std::optional<double> eval_diameter;
    auto* eval = app.add_subcommand("eval", "Coordinate accuracy between two CMAP files");
    eval->add_option("pred", eval_pred, "Predicted coordinate map")->required();
    eval->add_option("gt", eval_gt, "Ground-truth coordinate map")->required();
    eval->add_option("--mesh", eval_mesh, "Mesh file for the diameter");
    eval->add_option("--diameter", eval_diameter, "Object diameter in meters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (inspect->parsed()) return run_codec_inspect(inspect_x);
        if (render->parsed()) return run_render(render_config, render_ov);
        if (ablate->parsed()) return run_ablate(ablate_config, ablate_ov, ablate_svg);
        if (loss_demo->parsed()) return run_loss_demo(schedule_path);
        if (eval->parsed()) return run_eval(eval_pred, eval_gt, eval_mesh, eval_diameter);
    } catch (const hcce::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
