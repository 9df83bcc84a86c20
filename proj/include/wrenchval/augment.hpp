#pragma once

#include <cstdint>

#include <json.hpp>

#include "wrenchval/record.hpp"
#include "wrenchval/tensor.hpp"

namespace wrenchval {

// Label-preserving augmentation policy: time dilation, translation and white
// noise only. Cropping, inversion, amplitude scaling and permutation would
// alter the force-level and ordering cues the classifiers depend on.
struct AugmentPolicy {
    double dilation_lo = 0.9, dilation_hi = 1.1;
    int translation_range = 40;        // +- samples
    double noise_std_fraction = 0.02;  // of per-channel std
    std::uint64_t seed = 0;
    double target_multiplier = 1.5;    // cap on dataset growth

    void validate() const;
    nlohmann::json to_json() const;
    static AugmentPolicy from_json(const nlohmann::json& j);
};

// Linear-interpolation resample by ratio, then center-crop or edge-pad back to
// the original length. ratio > 1 stretches (slows) the signal.
Tensor time_dilate(const Tensor& x, double ratio);

// Shift along time with edge replication; positive shift moves content later.
Tensor translate(const Tensor& x, int shift);

// Adds i.i.d. zero-mean Gaussian noise, per-channel std = fraction * channel std.
Tensor add_noise(const Tensor& x, double std_fraction, std::uint64_t seed);

// Synthesizes augmented copies of minority-class records until classes are
// balanced or the multiplier cap is reached. Originals are untouched and come
// first; augmented copies are flagged.
Dataset balance_dataset(const Dataset& d, const AugmentPolicy& policy);

}  // namespace wrenchval
