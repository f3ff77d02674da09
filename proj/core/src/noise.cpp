#include <cmath>

#include "hccepose/errors.hpp"
#include "hccepose/experiment.hpp"
#include "hccepose/rng.hpp"

namespace hcce {

namespace {

constexpr std::uint64_t kNoiseSalt = 0x4e4f495aULL;

Eigen::Vector3d gaussian3(std::mt19937_64& rng, double sigma) {
    std::normal_distribution<double> gauss(0.0, sigma);
    return {gauss(rng), gauss(rng), gauss(rng)};
}

// Uniform sample inside a ball: random direction scaled by radius * u^(1/3).
Eigen::Vector3d uniform_in_ball(std::mt19937_64& rng, double radius) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::Vector3d dir(gauss(rng), gauss(rng), gauss(rng));
    const double norm = dir.norm();
    if (norm < 1e-300) return Eigen::Vector3d::Zero();
    return dir * (radius * std::cbrt(unit(rng)) / norm);
}

}  // namespace

void NoiseModel::validate() const {
    if (coord_sigma < 0.0 || outlier_rate < 0.0 || outlier_scale < 0.0) {
        throw DomainError("NoiseModel: parameters must be >= 0");
    }
    if (outlier_rate > 1.0) {
        throw DomainError("NoiseModel: outlier_rate must be <= 1");
    }
}

CoordinateMap corrupt_map(const CoordinateMap& map, const NoiseModel& noise, double diameter,
                          std::uint64_t seed) {
    noise.validate();
    if (!noise.enabled()) return map;
    if (!(diameter > 0.0)) throw DomainError("corrupt_map: diameter must be > 0");

    CoordinateMap out = map;
    std::mt19937_64 rng(derive_seed(seed, kNoiseSalt));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double sigma = noise.coord_sigma * diameter;
    const double outlier_radius = noise.outlier_scale * diameter;

    for (std::size_t i = 0; i < map.mask.size(); ++i) {
        if (!map.mask[i]) continue;
        if (sigma > 0.0) {
            out.front[i] += gaussian3(rng, sigma);
            out.back[i] += gaussian3(rng, sigma);
        }
        if (noise.outlier_rate > 0.0 && unit(rng) < noise.outlier_rate) {
            out.front[i] = map.front[i] + uniform_in_ball(rng, outlier_radius);
            out.back[i] = map.back[i] + uniform_in_ball(rng, outlier_radius);
        }
    }
    return out;
}

}  // namespace hcce
