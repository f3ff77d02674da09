#include "hccepose/loss.hpp"

#include <cmath>
#include <string>

namespace hcce {

void LossConfig::validate() const {
    if (!(sigma > 0.0)) throw DomainError("LossConfig: sigma must be > 0");
    if (!(gamma > 0.0)) throw DomainError("LossConfig: gamma must be > 0");
}

std::vector<double> level_error_rates(const std::vector<ContinuousCodeVector>& pred_codes,
                                      const std::vector<BinaryCodeVector>& gt_bits,
                                      const HierarchicalCodec& codec) {
    if (pred_codes.empty()) {
        throw DegenerateInputError("level_error_rates: empty pixel batch");
    }
    if (pred_codes.size() != gt_bits.size()) {
        throw ShapeError("level_error_rates: " + std::to_string(pred_codes.size()) +
                         " predictions vs " + std::to_string(gt_bits.size()) + " labels");
    }
    const int levels = codec.levels();
    std::vector<std::size_t> wrong(static_cast<std::size_t>(levels), 0);
    for (std::size_t j = 0; j < pred_codes.size(); ++j) {
        const BinaryCodeVector pred_bits = codec.to_binary(pred_codes[j]);
        for (int i = 0; i < levels; ++i) {
            if (pred_bits.bits[i] != gt_bits[j].bits[i]) ++wrong[i];
        }
    }
    std::vector<double> rates(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        rates[i] = static_cast<double>(wrong[i]) / static_cast<double>(pred_codes.size());
    }
    return rates;
}

double histogram_intensity(double error_rate, double sigma) {
    return std::exp(sigma * std::min(error_rate, 0.5 - error_rate));
}

std::vector<double> level_weights(const std::vector<double>& intensities) {
    if (intensities.empty()) throw DegenerateInputError("level_weights: empty intensity vector");
    double sum = 0.0;
    for (double h : intensities) {
        if (!(h > 0.0)) throw DomainError("level_weights: intensities must be positive");
        sum += h;
    }
    std::vector<double> weights(intensities.size());
    for (std::size_t i = 0; i < intensities.size(); ++i) weights[i] = intensities[i] / sum;
    return weights;
}

LevelErrorHistogram build_histogram(const std::vector<ContinuousCodeVector>& pred_codes,
                                    const std::vector<BinaryCodeVector>& gt_bits,
                                    const HierarchicalCodec& codec, double sigma) {
    LevelErrorHistogram h;
    h.error_rates = level_error_rates(pred_codes, gt_bits, codec);
    h.intensities.resize(h.error_rates.size());
    for (std::size_t i = 0; i < h.error_rates.size(); ++i) {
        h.intensities[i] = histogram_intensity(h.error_rates[i], sigma);
    }
    h.weights = level_weights(h.intensities);
    return h;
}

double hierarchical_component_loss(const std::vector<ContinuousCodeVector>& pred_codes,
                                   const std::vector<ContinuousCodeVector>& gt_codes,
                                   const std::vector<double>& weights) {
    if (pred_codes.size() != gt_codes.size()) {
        throw ShapeError("hierarchical_component_loss: " + std::to_string(pred_codes.size()) +
                         " predictions vs " + std::to_string(gt_codes.size()) + " labels");
    }
    const int levels = static_cast<int>(weights.size());
    double loss = 0.0;
    for (int i = 0; i < levels; ++i) {
        double level_sum = 0.0;
        for (std::size_t j = 0; j < pred_codes.size(); ++j) {
            level_sum += std::abs(pred_codes[j].levels[i] - gt_codes[j].levels[i]);
        }
        loss += weights[static_cast<std::size_t>(i)] * level_sum;
    }
    return loss;
}

double mask_loss(const std::vector<double>& pred_mask, const std::vector<std::uint8_t>& gt_mask) {
    if (pred_mask.size() != gt_mask.size()) {
        throw ShapeError("mask_loss: " + std::to_string(pred_mask.size()) + " vs " +
                         std::to_string(gt_mask.size()) + " pixels");
    }
    double loss = 0.0;
    for (std::size_t i = 0; i < pred_mask.size(); ++i) {
        loss += std::abs(pred_mask[i] - static_cast<double>(gt_mask[i]));
    }
    return loss;
}

double total_loss(double mask_l, double front_l, double back_l, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("total_loss: gamma must be > 0");
    return mask_l + gamma * (front_l + back_l);
}

}  // namespace hcce
