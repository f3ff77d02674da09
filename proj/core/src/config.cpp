#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hccepose/errors.hpp"
#include "hccepose/experiment.hpp"

namespace hcce {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ParseError("config: unknown key '" + key + "' in " + where);
        }
    }
}

Eigen::Vector3d parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) {
        throw ParseError("config: " + where + " must be an array of 3 numbers");
    }
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: invalid JSON: ") + e.what());
    }

    ExperimentConfig cfg;
    try {
        reject_unknown_keys(j, {"mesh", "camera", "pose_sampler", "noise", "modes", "scenes",
                                "seed", "threads", "d_bar", "symmetric", "ransac", "loss",
                                "out_dir", "write_svg"},
                            "top level");

        cfg.mesh_path = j.at("mesh").get<std::string>();
        if (j.contains("camera")) {
            const json& c = j["camera"];
            reject_unknown_keys(c, {"fx", "fy", "cx", "cy", "width", "height"}, "camera");
            cfg.camera.fx = c.value("fx", cfg.camera.fx);
            cfg.camera.fy = c.value("fy", cfg.camera.fy);
            cfg.camera.cx = c.value("cx", cfg.camera.cx);
            cfg.camera.cy = c.value("cy", cfg.camera.cy);
            cfg.camera.width = c.value("width", cfg.camera.width);
            cfg.camera.height = c.value("height", cfg.camera.height);
        }
        if (j.contains("pose_sampler")) {
            const json& p = j["pose_sampler"];
            reject_unknown_keys(p, {"translation_min", "translation_max"}, "pose_sampler");
            if (p.contains("translation_min")) {
                cfg.pose_sampler.translation_min =
                    parse_vec3(p["translation_min"], "pose_sampler.translation_min");
            }
            if (p.contains("translation_max")) {
                cfg.pose_sampler.translation_max =
                    parse_vec3(p["translation_max"], "pose_sampler.translation_max");
            }
        }
        if (j.contains("noise")) {
            const json& n = j["noise"];
            reject_unknown_keys(n, {"coord_sigma", "outlier_rate", "outlier_scale"}, "noise");
            cfg.noise.coord_sigma = n.value("coord_sigma", 0.0);
            cfg.noise.outlier_rate = n.value("outlier_rate", 0.0);
            cfg.noise.outlier_scale = n.value("outlier_scale", 0.0);
        }
        if (j.contains("modes")) {
            cfg.modes.clear();
            for (const auto& m : j["modes"]) {
                cfg.modes.push_back(mode_from_name(m.get<std::string>()));
            }
        }
        cfg.scenes = j.value("scenes", cfg.scenes);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.threads = j.value("threads", cfg.threads);
        if (j.contains("d_bar") && !j["d_bar"].is_null()) {
            if (j["d_bar"].is_string()) {
                if (j["d_bar"].get<std::string>() != "auto") {
                    throw ParseError("config: d_bar must be a number or \"auto\"");
                }
            } else {
                cfg.d_bar = j["d_bar"].get<double>();
            }
        }
        cfg.symmetric = j.value("symmetric", cfg.symmetric);
        if (j.contains("ransac")) {
            const json& r = j["ransac"];
            reject_unknown_keys(r, {"iterations", "threshold", "sample_size", "seed", "refine",
                                    "score_all_sources", "scoring"},
                                "ransac");
            cfg.ransac.iterations = r.value("iterations", cfg.ransac.iterations);
            cfg.ransac.threshold = r.value("threshold", cfg.ransac.threshold);
            cfg.ransac.sample_size = r.value("sample_size", cfg.ransac.sample_size);
            cfg.ransac.seed = r.value("seed", cfg.ransac.seed);
            cfg.ransac.refine = r.value("refine", cfg.ransac.refine);
            cfg.ransac.score_all_sources =
                r.value("score_all_sources", cfg.ransac.score_all_sources);
            if (r.contains("scoring")) {
                const std::string s = r["scoring"].get<std::string>();
                if (s == "inliers") {
                    cfg.ransac.scoring = RansacScoring::InlierCount;
                } else if (s == "mean_error") {
                    cfg.ransac.scoring = RansacScoring::MeanError;
                } else {
                    throw ParseError("config: ransac.scoring must be 'inliers' or 'mean_error'");
                }
            }
        }
        if (j.contains("loss")) {
            const json& l = j["loss"];
            reject_unknown_keys(l, {"sigma", "gamma"}, "loss");
            cfg.loss.sigma = l.value("sigma", cfg.loss.sigma);
            cfg.loss.gamma = l.value("gamma", cfg.loss.gamma);
        }
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
        cfg.write_svg = j.value("write_svg", cfg.write_svg);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["mesh"] = cfg.mesh_path;
    j["camera"] = {{"fx", cfg.camera.fx},   {"fy", cfg.camera.fy},
                   {"cx", cfg.camera.cx},   {"cy", cfg.camera.cy},
                   {"width", cfg.camera.width}, {"height", cfg.camera.height}};
    j["pose_sampler"] = {
        {"translation_min",
         {cfg.pose_sampler.translation_min.x(), cfg.pose_sampler.translation_min.y(),
          cfg.pose_sampler.translation_min.z()}},
        {"translation_max",
         {cfg.pose_sampler.translation_max.x(), cfg.pose_sampler.translation_max.y(),
          cfg.pose_sampler.translation_max.z()}}};
    j["noise"] = {{"coord_sigma", cfg.noise.coord_sigma},
                  {"outlier_rate", cfg.noise.outlier_rate},
                  {"outlier_scale", cfg.noise.outlier_scale}};
    std::vector<std::string> modes;
    modes.reserve(cfg.modes.size());
    for (auto m : cfg.modes) modes.emplace_back(mode_name(m));
    j["modes"] = modes;
    j["scenes"] = cfg.scenes;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    if (cfg.d_bar) {
        j["d_bar"] = *cfg.d_bar;
    } else {
        j["d_bar"] = "auto";
    }
    j["symmetric"] = cfg.symmetric;
    j["ransac"] = {{"iterations", cfg.ransac.iterations},
                   {"threshold", cfg.ransac.threshold},
                   {"sample_size", cfg.ransac.sample_size},
                   {"seed", cfg.ransac.seed},
                   {"refine", cfg.ransac.refine},
                   {"score_all_sources", cfg.ransac.score_all_sources},
                   {"scoring", cfg.ransac.scoring == RansacScoring::InlierCount ? "inliers"
                                                                                : "mean_error"}};
    j["loss"] = {{"sigma", cfg.loss.sigma}, {"gamma", cfg.loss.gamma}};
    j["out_dir"] = cfg.out_dir;
    j["write_svg"] = cfg.write_svg;
    return j.dump(2);
}

}  // namespace hcce
