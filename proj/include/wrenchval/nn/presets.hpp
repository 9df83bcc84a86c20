#pragma once

#include <map>
#include <string>

#include "wrenchval/nn/model_spec.hpp"

namespace wrenchval::nn {

enum class Preset { FfAnn, Cnn1d, Cnn2d, HybridAll, HybridUnitMeasure, HybridSpecific };

Preset preset_from_string(const std::string& s);
std::string to_string(Preset p);

// Emits an architecture honoring the house rules: conv kernels 20-100 samples
// with strides 10-50% of the kernel, filter count doubling with depth, dropout
// 20-40%, GlobalMaxPool ahead of a dense taper that stops at 16.
// Unit-Measure groups branches by physical unit: forces, torques, position
// deltas, force scaleograms, torque scaleograms.
ModelSpec build_preset(ActionKind action_kind, Preset preset,
                       const std::map<int, std::string>& class_map, int input_len = 800);

}  // namespace wrenchval::nn
