#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>

#include "hccepose/errors.hpp"

namespace hcce {

/// Upper limit on the number of encoding levels. Deeper levels add no useful
/// precision to the represented component, so codes are capped here.
inline constexpr int kMaxCodeLevels = 8;

/// Per-axis affine map between model-space bounds and the unit cube.
struct BoundingNormalizer {
    Eigen::Vector3d min_corner{0.0, 0.0, 0.0};
    Eigen::Vector3d extent{1.0, 1.0, 1.0};

    BoundingNormalizer() = default;
    BoundingNormalizer(const Eigen::Vector3d& min_corner, const Eigen::Vector3d& extent);
};

/// A model-space point mapped into [0,1]^3.
struct NormalizedCoordinate {
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;
};

NormalizedCoordinate normalize(const Eigen::Vector3d& point, const BoundingNormalizer& n);
Eigen::Vector3d denormalize(const NormalizedCoordinate& c, const BoundingNormalizer& n);

/// Multi-level continuous code of one coordinate component.
/// levels[0] holds the first level, which is the raw component itself.
struct ContinuousCodeVector {
    std::array<double, kMaxCodeLevels> levels{};
    int count = kMaxCodeLevels;

    friend bool operator==(const ContinuousCodeVector&, const ContinuousCodeVector&) = default;
};

/// Multi-level binary code of one coordinate component. bits[0] is level 1.
struct BinaryCodeVector {
    std::array<std::uint8_t, kMaxCodeLevels> bits{};
    int count = kMaxCodeLevels;

    friend bool operator==(const BinaryCodeVector&, const BinaryCodeVector&) = default;
};

/// Hierarchical coordinate codec. Encodes a component x in [0,1] either as
/// plain multi-level binary digits (the binary expansion of x) or as
/// multi-level continuous codes built by the mirror recursion
///
///     f_1(x) = x,   f_i(x) = f_{i-1}(2x) for x < 0.5,
///                   f_i(x) = f_{i-1}(2 - 2x) for x >= 0.5,
///
/// whose level i is piecewise linear with slope magnitude 2^(i-1). Continuous
/// codes binarize through to_binary(), which reverses the mirroring: with
/// g(t) = 1 iff t >= 0.5, bit i is g(C_i) when the previous bit is 0 and
/// 1 - g(C_i) when it is 1.
class HierarchicalCodec {
public:
    /// levels must lie in [1, kMaxCodeLevels]; defaults to the full depth.
    explicit HierarchicalCodec(int levels = kMaxCodeLevels);

    int levels() const { return levels_; }

    /// Binary expansion of x, most significant fractional digit first.
    /// x = 1 lands in the top bin (all ones). Throws DomainError outside [0,1].
    BinaryCodeVector hbce_encode(double x) const;

    /// Mirror-recursion continuous codes of x. Level 1 equals x exactly.
    /// Throws DomainError outside [0,1].
    ContinuousCodeVector hcce_encode(double x) const;

    /// Converts continuous codes to binary codes by reversing the mirroring.
    BinaryCodeVector to_binary(const ContinuousCodeVector& code) const;

    /// Place-value decode: sum of 2^(-i) * bit_i. With midpoint set, adds half
    /// a bin (2^-(levels+1)) so the result sits at the bin center instead of
    /// the bin floor.
    double decode(const BinaryCodeVector& bits, bool midpoint = false) const;

private:
    int levels_;
};

}  // namespace hcce
