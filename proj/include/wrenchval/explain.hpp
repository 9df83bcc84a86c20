#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wrenchval/nn/graph.hpp"
#include "wrenchval/tensor.hpp"

namespace wrenchval {

// Relevance heatmap aligned to one branch's input: [L] for 1-D branches,
// [scaleogram_height, L] for 2-D ones. Values normalized to [0,1]; an
// identically-zero map stays zero.
struct Attribution {
    Tensor values;
    int target_class = 0;
    std::string source_layer;
};

enum class CamWeighting { MaxPool, AveragePool };

struct GradCamOptions {
    CamWeighting weighting = CamWeighting::MaxPool;
    bool probability_target = false;  // gradients on softmax output instead of the logit
};

// Filter weights from max-pooled gradients of the target score w.r.t. the
// branch's last conv feature map; weighted sum, ReLU, resampled to the input
// grid, min-max normalized.
Attribution gradcam_1d(const nn::Model& model, const std::vector<TensorF>& inputs, int target_class,
                       std::size_t branch, const GradCamOptions& opts = {});

Attribution gradcam_2d(const nn::Model& model, const std::vector<TensorF>& inputs, int target_class,
                       std::size_t branch, const GradCamOptions& opts = {});

// CSV (time, per-channel signal, heat) plus a PNG with the heat underlay.
// window is the [C, L] branch input signal; returns {csv_path, png_path}.
std::pair<std::filesystem::path, std::filesystem::path> export_attribution(
    const Attribution& att, const Tensor& window, const std::vector<std::string>& channel_names,
    double sample_rate_hz, const std::filesystem::path& base_path);

}  // namespace wrenchval
