#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hccepose/cmap_io.hpp"
#include "hccepose/experiment.hpp"
#include "hccepose/metrics.hpp"
#include "support/test_meshes.hpp"

using namespace hcce;
namespace tm = hcce::testing;

namespace {

ExperimentConfig base_config() {
    ExperimentConfig cfg;
    cfg.mesh_path = "(in-memory)";
    cfg.camera = {160.0, 160.0, 64.5, 64.5, 128, 128};
    cfg.scenes = 3;
    cfg.seed = 42;
    return cfg;
}

std::string map_bytes(const CoordinateMap& map) {
    std::ostringstream ss(std::ios::binary);
    save_coordinate_map(map, ss);
    return ss.str();
}

std::filesystem::path temp_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "hccepose_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("scenes are deterministic per (seed, index)") {
    const TriangleMesh mesh = tm::icosphere(1);
    const ExperimentConfig cfg = base_config();
    const Scene a = generate_scene(mesh, cfg, 2);
    const Scene b = generate_scene(mesh, cfg, 2);
    CHECK(map_bytes(a.map) == map_bytes(b.map));
    CHECK(a.pose.rotation == b.pose.rotation);
    CHECK(a.pose.translation == b.pose.translation);

    const Scene c = generate_scene(mesh, cfg, 3);
    CHECK(map_bytes(a.map) != map_bytes(c.map));
}

TEST_CASE("an unviewable translation box fails after bounded attempts") {
    const TriangleMesh mesh = tm::unit_cube();
    ExperimentConfig cfg = base_config();
    cfg.pose_sampler.translation_min = {-0.1, -0.1, -3.0};
    cfg.pose_sampler.translation_max = {0.1, 0.1, -2.0};
    CHECK_THROWS_AS(generate_scene(mesh, cfg, 0), UnrenderableError);
}

TEST_CASE("uniform rotation sampling has the Haar mean angle") {
    std::mt19937_64 rng(123);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        const Eigen::Matrix3d r = sample_uniform_rotation(rng);
        sum += rotation_geodesic(Eigen::Matrix3d::Identity(), r);
    }
    const double mean_deg = sum / n * 180.0 / M_PI;
    CHECK(mean_deg > 124.5);
    CHECK(mean_deg < 128.5);
}

TEST_CASE("zero noise leaves the map untouched") {
    const TriangleMesh mesh = tm::unit_cube();
    const Scene scene = generate_scene(mesh, base_config(), 0);
    const CoordinateMap out = corrupt_map(scene.map, NoiseModel{}, mesh.diameter, 7);
    CHECK(map_bytes(out) == map_bytes(scene.map));
}

TEST_CASE("gaussian noise hits the chi-distribution coordinate accuracy") {
    const TriangleMesh mesh = tm::icosphere(2);
    ExperimentConfig cfg = base_config();
    const Scene scene = generate_scene(mesh, cfg, 1);
    REQUIRE(scene.map.mask_area() > 2000);

    NoiseModel noise;
    noise.coord_sigma = 0.01;
    const CoordinateMap noisy = corrupt_map(scene.map, noise, mesh.diameter, 99);
    const auto rows = coordinate_accuracy(noisy, scene.map, mesh.diameter);
    // Threshold 0.02 d = 2 sigma: P(|N(0, sigma^2 I3)| < 2 sigma) ~= 0.7385.
    CHECK(rows[0].front == doctest::Approx(0.7385).epsilon(0.035));
    CHECK(rows[0].back == doctest::Approx(0.7385).epsilon(0.035));

    // Determinism.
    const CoordinateMap again = corrupt_map(scene.map, noise, mesh.diameter, 99);
    CHECK(map_bytes(again) == map_bytes(noisy));
    const CoordinateMap other = corrupt_map(scene.map, noise, mesh.diameter, 100);
    CHECK(map_bytes(other) != map_bytes(noisy));
}

TEST_CASE("total corruption collapses coordinate accuracy") {
    const TriangleMesh mesh = tm::unit_cube();
    const Scene scene = generate_scene(mesh, base_config(), 0);
    NoiseModel noise;
    noise.outlier_rate = 1.0;
    noise.outlier_scale = 50.0;
    const CoordinateMap noisy = corrupt_map(scene.map, noise, mesh.diameter, 5);
    const auto rows = coordinate_accuracy(noisy, scene.map, mesh.diameter);
    CHECK(rows[2].front < 0.05);  // even the 10% threshold is hopeless
    CHECK(rows[2].back < 0.05);
}

TEST_CASE("noise model validates") {
    NoiseModel noise;
    noise.outlier_rate = 1.5;
    CHECK_THROWS_AS(noise.validate(), DomainError);
    noise.outlier_rate = -0.1;
    CHECK_THROWS_AS(noise.validate(), DomainError);
}

TEST_CASE("coordinate maps round trip bit-exactly") {
    const TriangleMesh mesh = tm::l_bracket();
    const Scene scene = generate_scene(mesh, base_config(), 0);
    const std::string first = map_bytes(scene.map);

    std::istringstream in(first, std::ios::binary);
    const CoordinateMap loaded = load_coordinate_map(in);
    CHECK(map_bytes(loaded) == first);
    CHECK(loaded.width == scene.map.width);
    CHECK(loaded.mask == scene.map.mask);
}

TEST_CASE("truncated and corrupted map files fail with the section name") {
    const TriangleMesh mesh = tm::unit_cube();
    const Scene scene = generate_scene(mesh, base_config(), 1);
    const std::string bytes = map_bytes(scene.map);

    struct Case {
        std::size_t keep;
        const char* expect;
    };
    const std::size_t header = 4 + 4 + 4 + 4;
    const std::size_t pixels = static_cast<std::size_t>(scene.map.width) * scene.map.height;
    const Case cases[] = {
        {2, "magic"},
        {header - 6, "width"},
        {header + pixels / 2, "mask"},
        {header + pixels + 11, "front"},
        {header + pixels + 12 * pixels + 3, "back"},
    };
    for (const auto& c : cases) {
        std::istringstream in(bytes.substr(0, c.keep), std::ios::binary);
        try {
            load_coordinate_map(in);
            FAIL("expected IoError for keep=", c.keep);
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find(c.expect) != std::string::npos);
        }
    }

    std::string wrong_magic = bytes;
    wrong_magic[0] = 'X';
    std::istringstream bad_magic(wrong_magic, std::ios::binary);
    CHECK_THROWS_AS(load_coordinate_map(bad_magic), IoError);

    std::string wrong_version = bytes;
    wrong_version[4] = 2;  // little-endian version field
    std::istringstream bad_version(wrong_version, std::ios::binary);
    try {
        load_coordinate_map(bad_version);
        FAIL("expected version error");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("version 2") != std::string::npos);
    }
}

TEST_CASE("correspondence sets round trip") {
    const TriangleMesh mesh = tm::unit_cube();
    const Scene scene = generate_scene(mesh, base_config(), 2);
    const auto set = build_correspondences(scene.map, CorrespondenceMode::UltraDense);
    REQUIRE(!set.records.empty());

    std::ostringstream out(std::ios::binary);
    save_correspondence_set(set, out);
    std::istringstream in(out.str(), std::ios::binary);
    const auto loaded = load_correspondence_set(in);
    REQUIRE(loaded.records.size() == set.records.size());
    CHECK(loaded.d_bar == set.d_bar);
    for (std::size_t i = 0; i < set.records.size(); ++i) {
        CHECK(loaded.records[i] == set.records[i]);
    }

    std::istringstream truncated(out.str().substr(0, 40), std::ios::binary);
    CHECK_THROWS_AS(load_correspondence_set(truncated), IoError);
}

TEST_CASE("config JSON parses, rejects unknown keys, and keeps defaults") {
    const std::string text = R"({
        "mesh": "data/cube.obj",
        "camera": {"fx": 120, "fy": 120, "cx": 32.5, "cy": 32.5, "width": 64, "height": 64},
        "noise": {"coord_sigma": 0.02, "outlier_rate": 0.1, "outlier_scale": 0.5},
        "modes": ["f", "bfu"],
        "scenes": 12,
        "seed": 7,
        "d_bar": "auto",
        "ransac": {"iterations": 80, "refine": false}
    })";
    const ExperimentConfig cfg = parse_experiment_config(text);
    CHECK(cfg.mesh_path == "data/cube.obj");
    CHECK(cfg.camera.width == 64);
    CHECK(cfg.noise.coord_sigma == 0.02);
    REQUIRE(cfg.modes.size() == 2);
    CHECK(cfg.modes[1] == CorrespondenceMode::UltraDense);
    CHECK(cfg.scenes == 12);
    CHECK(!cfg.d_bar.has_value());
    CHECK(cfg.ransac.iterations == 80);
    CHECK(cfg.ransac.refine == false);
    // Untouched defaults.
    CHECK(cfg.ransac.threshold == 2.0);
    CHECK(cfg.ransac.sample_size == 4);
    CHECK(cfg.loss.sigma == 4.0);
    CHECK(cfg.loss.gamma == 1.0);

    CHECK_THROWS_AS(parse_experiment_config(R"({"mesh": "x", "typo_key": 1})"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"mesh": "x", "modes": ["q"]})"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config("not json"), ParseError);
    CHECK_THROWS_AS(parse_experiment_config(R"({"mesh": "x", "scenes": 0})"), DomainError);

    // Round trip through the serializer.
    const ExperimentConfig again = parse_experiment_config(experiment_config_to_json(cfg));
    CHECK(again.scenes == cfg.scenes);
    CHECK(again.ransac.iterations == cfg.ransac.iterations);
    CHECK(experiment_config_to_json(again) == experiment_config_to_json(cfg));
}

TEST_CASE("a ransac section left out keeps the stock protocol") {
    const ExperimentConfig cfg = parse_experiment_config(R"({"mesh": "m.obj"})");
    CHECK(cfg.ransac.iterations == 150);
    CHECK(cfg.ransac.threshold == 2.0);
}

TEST_CASE("noise-free ablation recovers every scene in every mode") {
    const TriangleMesh mesh = tm::icosphere(1);
    ExperimentConfig cfg = base_config();
    cfg.scenes = 4;
    const AblationReport report = run_ablation(mesh, cfg);
    REQUIRE(report.rows.size() == 4);
    for (const auto& row : report.rows) {
        CHECK(row.failures == 0);
        CHECK(row.add_recall == 1.0);
    }
    for (const auto& sr : report.scene_results) {
        for (const auto& mr : sr.mode_results) {
            REQUIRE(!mr.failed);
            CHECK(mr.rot_err < 1e-3);
            CHECK(mr.trans_err < 1e-4);
        }
    }
}

TEST_CASE("ablation artifacts are byte-identical across runs and thread counts") {
    const TriangleMesh mesh = tm::unit_cube();
    ExperimentConfig cfg = base_config();
    cfg.scenes = 3;
    cfg.noise = {0.02, 0.1, 0.5};
    cfg.ransac.iterations = 40;

    const auto dir = temp_dir();
    auto run_to = [&](const std::string& tag, int threads) {
        ExperimentConfig c = cfg;
        c.threads = threads;
        const AblationReport report = run_ablation(mesh, c);
        write_ablation_csv(report, c, (dir / ("abl_" + tag + ".csv")).string());
        write_ablation_json(report, c, (dir / ("abl_" + tag + ".json")).string());
    };
    run_to("a", 1);
    run_to("b", 1);
    run_to("c", 4);

    const std::string csv_a = slurp(dir / "abl_a.csv");
    CHECK(csv_a == slurp(dir / "abl_b.csv"));
    CHECK(csv_a == slurp(dir / "abl_c.csv"));
    CHECK(slurp(dir / "abl_a.json") == slurp(dir / "abl_b.json"));
    CHECK(!csv_a.empty());

    // Thread count is echoed in the json config block, so compare the rest.
    auto ja = nlohmann::json::parse(slurp(dir / "abl_a.json"));
    auto jc = nlohmann::json::parse(slurp(dir / "abl_c.json"));
    CHECK(ja["aggregates"] == jc["aggregates"]);
    CHECK(ja["scenes"] == jc["scenes"]);
}

TEST_CASE("csv aggregates agree with a recomputation from the per-scene json") {
    const TriangleMesh mesh = tm::unit_cube();
    ExperimentConfig cfg = base_config();
    cfg.scenes = 5;
    cfg.noise = {0.015, 0.05, 0.4};
    cfg.ransac.iterations = 50;
    const AblationReport report = run_ablation(mesh, cfg);

    const auto dir = temp_dir();
    write_ablation_csv(report, cfg, (dir / "xcheck.csv").string());
    write_ablation_json(report, cfg, (dir / "xcheck.json").string());
    const auto j = nlohmann::json::parse(slurp(dir / "xcheck.json"));

    // Recompute each aggregate from the stored per-scene records.
    for (std::size_t mi = 0; mi < cfg.modes.size(); ++mi) {
        const std::string name(mode_name(cfg.modes[mi]));
        std::vector<double> rot, add;
        int failures = 0;
        for (const auto& s : j["scenes"]) {
            const auto& m = s["modes"][name];
            if (m["failed"].get<bool>()) {
                ++failures;
                continue;
            }
            rot.push_back(m["rot_err_rad"].get<double>());
            add.push_back(m["add_err_m"].get<double>());
        }
        const auto& agg = j["aggregates"][mi];
        CHECK(agg["failures"].get<int>() == failures);
        std::sort(rot.begin(), rot.end());
        const double med = rot.size() % 2 ? rot[rot.size() / 2]
                                          : 0.5 * (rot[rot.size() / 2 - 1] + rot[rot.size() / 2]);
        CHECK(agg["rot_median_rad"].get<double>() == doctest::Approx(med).epsilon(1e-12));
        CHECK(agg["add_recall_0.1d"].get<double>() ==
              doctest::Approx(recall_at_threshold(add, mesh.diameter, 0.1)).epsilon(1e-12));
        CHECK(agg["add_auc_10cm"].get<double>() == doctest::Approx(auc(add, 0.10)).epsilon(1e-12));
    }

    // CSV rows print the same numbers at reduced precision.
    std::istringstream csv(slurp(dir / "xcheck.csv"));
    std::string line;
    std::getline(csv, line);  // header
    std::size_t mi = 0;
    while (std::getline(csv, line)) {
        REQUIRE(mi < report.rows.size());
        std::stringstream ls(line);
        std::string cell;
        std::getline(ls, cell, ',');
        CHECK(cell == std::string(mode_name(report.rows[mi].mode)));
        std::getline(ls, cell, ',');
        CHECK(std::stoi(cell) == report.rows[mi].scenes);
        std::getline(ls, cell, ',');
        CHECK(std::stoi(cell) == report.rows[mi].failures);
        std::getline(ls, cell, ',');
        CHECK(std::stod(cell) == doctest::Approx(report.rows[mi].rot_median).epsilon(1e-9));
        ++mi;
    }
    CHECK(mi == report.rows.size());
}

TEST_CASE("recall curve svg is written") {
    const auto dir = temp_dir();
    const auto path = dir / "curve.svg";
    write_recall_svg({0.01, 0.02, 0.05, 0.2}, 1.0, "f", path.string());
    const std::string svg = slurp(path);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

TEST_SUITE_END();
