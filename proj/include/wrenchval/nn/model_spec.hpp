#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrenchval/record.hpp"

namespace wrenchval::nn {

enum class LayerKind {
    Dense,
    Conv1d,
    Conv2d,
    MaxPool1d,
    MaxPool2d,
    GlobalMaxPool,
    Dropout,
    Relu,
    Flatten,
    Concat,
};

std::string to_string(LayerKind k);
LayerKind layer_kind_from_string(const std::string& s);

struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    int units = 0;                                    // Dense
    int filters = 0, kernel = 0, stride = 1;          // Conv1d
    int kernel_h = 0, kernel_w = 0;                   // Conv2d
    int stride_h = 1, stride_w = 1;
    int pool = 2;                                     // MaxPool1d / MaxPool2d (square)
    double rate = 0.0;                                // Dropout

    static LayerSpec dense(int units);
    static LayerSpec conv1d(int filters, int kernel, int stride);
    static LayerSpec conv2d(int filters, int kh, int kw, int sh, int sw);
    static LayerSpec maxpool1d(int pool);
    static LayerSpec maxpool2d(int pool);
    static LayerSpec global_max_pool();
    static LayerSpec dropout(double rate);
    static LayerSpec relu();
    static LayerSpec flatten();

    nlohmann::json to_json() const;
    static LayerSpec from_json(const nlohmann::json& j);
};

enum class InputKind { Signals1d, Scaleograms2d };

std::string to_string(InputKind k);

struct BranchSpec {
    InputKind input = InputKind::Signals1d;
    std::vector<int> channels;  // record channel indices feeding this branch
    std::vector<LayerSpec> layers;

    nlohmann::json to_json() const;
    static BranchSpec from_json(const nlohmann::json& j);
};

// Multi-branch network description. Branches end in rank-1 feature vectors,
// which are concatenated and fed through the dense head; the head's final
// Dense layer is the C-way output.
struct ModelSpec {
    ActionKind action_kind = ActionKind::Button;
    int input_len = 800;
    int scaleogram_height = 128;
    std::vector<BranchSpec> branches;
    std::vector<LayerSpec> head;
    std::map<int, std::string> class_map;
    std::size_t param_cap = 8'000'000;

    std::size_t n_classes() const { return class_map.size(); }

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);
};

// Output shape of every layer; computed up front so parameter sizing, the
// preset linter and the runtime all agree.
struct ModelShapes {
    std::vector<std::vector<std::size_t>> branch_inputs;              // [branch] -> shape
    std::vector<std::vector<std::vector<std::size_t>>> branch_layers; // [branch][layer] -> shape
    std::size_t concat_dim = 0;
    std::vector<std::vector<std::size_t>> head_layers;                // [layer] -> shape
};

// Throws DataError naming the offending branch/layer on any inconsistency.
ModelShapes infer_shapes(const ModelSpec& spec);

std::size_t parameter_count(const ModelSpec& spec);

// Architecture conformance: conv kernels within [20,100] samples with stride
// 10-50% of the kernel, dropout rates within [0.2,0.4], dense head taper
// non-increasing with a floor of 16 before the output, parameter count within
// the cap. Returns human-readable violations; empty means conformant.
std::vector<std::string> lint_model(const ModelSpec& spec);

}  // namespace wrenchval::nn
