#pragma once

#include <cstdint>
#include <vector>

#include "hccepose/codec.hpp"

namespace hcce {

/// Scalar knobs of the training loss: sigma shapes the histogram intensity
/// curve, gamma weights the hierarchical term against the mask term.
struct LossConfig {
    double sigma = 4.0;
    double gamma = 1.0;

    void validate() const;
};

/// Per-level error rates, intensities and normalized weights for one
/// coordinate component of one surface. Six of these exist per object
/// (front/back x x/y/z); they are never pooled.
struct LevelErrorHistogram {
    std::vector<double> error_rates;
    std::vector<double> intensities;
    std::vector<double> weights;
};

/// Fraction of pixels whose binarized predicted code differs from the ground
/// truth bit, per level. Both lists hold one entry per masked pixel.
/// Throws DegenerateInputError on empty input, ShapeError on length mismatch.
std::vector<double> level_error_rates(const std::vector<ContinuousCodeVector>& pred_codes,
                                      const std::vector<BinaryCodeVector>& gt_bits,
                                      const HierarchicalCodec& codec);

/// exp(sigma * min(r, 0.5 - r)). Peaks at r = 0.25; drops below 1 for r > 0.5,
/// downweighting levels the network is getting mostly wrong.
double histogram_intensity(double error_rate, double sigma);

/// Normalizes intensities to weights summing to 1. All intensities must be > 0.
std::vector<double> level_weights(const std::vector<double>& intensities);

/// Rates -> intensities -> weights for one component batch.
LevelErrorHistogram build_histogram(const std::vector<ContinuousCodeVector>& pred_codes,
                                    const std::vector<BinaryCodeVector>& gt_bits,
                                    const HierarchicalCodec& codec, double sigma);

/// Weighted hierarchical L1 for one component:
/// sum over levels i of w_i * sum over pixels j of |C_ij - C~_ij|.
double hierarchical_component_loss(const std::vector<ContinuousCodeVector>& pred_codes,
                                   const std::vector<ContinuousCodeVector>& gt_codes,
                                   const std::vector<double>& weights);

/// L1 mask loss summed over all pixels.
double mask_loss(const std::vector<double>& pred_mask, const std::vector<std::uint8_t>& gt_mask);

/// mask + gamma * (front + back), where each surface loss is the sum of its
/// three component losses.
double total_loss(double mask_l, double front_l, double back_l, double gamma);

}  // namespace hcce
