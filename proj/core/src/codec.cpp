#include "hccepose/codec.hpp"

#include <algorithm>
#include <cmath>

namespace hcce {

namespace {

constexpr double kClampTolerance = 1e-9;

void require_unit_interval(double x, const char* op) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError(std::string(op) + ": input " + std::to_string(x) +
                          " outside [0, 1]");
    }
}

// One mirror step. 2x is exact in floating point, and 2 - 2x is exact by
// Sterbenz's lemma for 2x in [1, 2], so iterating this map introduces no
// rounding error for x in [0, 1].
double mirror_step(double x) {
    return x < 0.5 ? 2.0 * x : 2.0 - 2.0 * x;
}

}  // namespace

BoundingNormalizer::BoundingNormalizer(const Eigen::Vector3d& min_corner_in,
                                       const Eigen::Vector3d& extent_in)
    : min_corner(min_corner_in), extent(extent_in) {
    for (int i = 0; i < 3; ++i) {
        if (!(extent[i] > 0.0)) {
            throw DomainError("BoundingNormalizer: extent component " +
                              std::to_string(i) + " must be positive, got " +
                              std::to_string(extent[i]));
        }
    }
}

NormalizedCoordinate normalize(const Eigen::Vector3d& point, const BoundingNormalizer& n) {
    NormalizedCoordinate out;
    double* comps[3] = {&out.u, &out.v, &out.w};
    for (int i = 0; i < 3; ++i) {
        if (!(n.extent[i] > 0.0)) {
            throw DomainError("normalize: invalid normalizer (non-positive extent)");
        }
        const double c = (point[i] - n.min_corner[i]) / n.extent[i];
        if (c < -kClampTolerance || c > 1.0 + kClampTolerance) {
            throw DomainError("normalize: point component " + std::to_string(i) +
                              " outside bounds (normalized " + std::to_string(c) + ")");
        }
        *comps[i] = std::clamp(c, 0.0, 1.0);
    }
    return out;
}

Eigen::Vector3d denormalize(const NormalizedCoordinate& c, const BoundingNormalizer& n) {
    return n.min_corner +
           Eigen::Vector3d(c.u * n.extent[0], c.v * n.extent[1], c.w * n.extent[2]);
}

HierarchicalCodec::HierarchicalCodec(int levels) : levels_(levels) {
    if (levels < 1 || levels > kMaxCodeLevels) {
        throw DomainError("HierarchicalCodec: level count " + std::to_string(levels) +
                          " outside [1, " + std::to_string(kMaxCodeLevels) + "]");
    }
}

BinaryCodeVector HierarchicalCodec::hbce_encode(double x) const {
    require_unit_interval(x, "hbce_encode");
    // Bin index in [0, 2^L). The bins are half-open [j*2^-L, (j+1)*2^-L)
    // with x = 1 assigned to the last bin, so the clamp below only fires there.
    const std::uint32_t bin_count = 1u << levels_;
    std::uint32_t bin = static_cast<std::uint32_t>(std::floor(x * static_cast<double>(bin_count)));
    bin = std::min(bin, bin_count - 1);
    BinaryCodeVector out;
    out.count = levels_;
    for (int i = 0; i < levels_; ++i) {
        out.bits[i] = static_cast<std::uint8_t>((bin >> (levels_ - 1 - i)) & 1u);
    }
    return out;
}

ContinuousCodeVector HierarchicalCodec::hcce_encode(double x) const {
    require_unit_interval(x, "hcce_encode");
    ContinuousCodeVector out;
    out.count = levels_;
    double value = x;
    for (int i = 0; i < levels_; ++i) {
        out.levels[i] = value;
        value = mirror_step(value);
    }
    return out;
}

BinaryCodeVector HierarchicalCodec::to_binary(const ContinuousCodeVector& code) const {
    const int n = std::min(levels_, code.count);
    BinaryCodeVector out;
    out.count = n;
    std::uint8_t prev = 0;
    for (int i = 0; i < n; ++i) {
        const std::uint8_t g = code.levels[i] >= 0.5 ? 1 : 0;
        // A set previous bit means this level was produced by mirroring, so
        // the binarization is inverted to undo it.
        const std::uint8_t bit = (prev == 0) ? g : static_cast<std::uint8_t>(1 - g);
        out.bits[i] = bit;
        prev = bit;
    }
    return out;
}

double HierarchicalCodec::decode(const BinaryCodeVector& bits, bool midpoint) const {
    const int n = std::min(levels_, bits.count);
    double value = 0.0;
    double scale = 0.5;
    for (int i = 0; i < n; ++i) {
        if (bits.bits[i]) value += scale;
        scale *= 0.5;
    }
    if (midpoint) value += scale;  // scale is now 2^-(n+1): half a bin
    return value;
}

}  // namespace hcce
