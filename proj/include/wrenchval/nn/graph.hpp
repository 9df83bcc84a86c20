#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wrenchval/nn/model_spec.hpp"
#include "wrenchval/tensor.hpp"

namespace wrenchval::nn {

template <typename T>
struct ParamSet {
    std::map<std::string, TensorT<T>> tensors;

    std::size_t count() const {
        std::size_t n = 0;
        for (const auto& [k, t] : tensors) n += t.size();
        return n;
    }
    template <typename U>
    ParamSet<U> cast() const {
        ParamSet<U> out;
        for (const auto& [k, t] : tensors) out.tensors.emplace(k, t.template cast<U>());
        return out;
    }
};

// Parameter names: "b<i>.l<j>.w" / "b<i>.l<j>.b" for branch layers, "head.l<j>.*" for the head.
std::string param_name(int branch, int layer, const char* which);
std::string head_param_name(int layer, const char* which);

enum class RunMode { Train, Eval };

template <typename T>
struct LayerState {
    TensorT<T> out;
    std::vector<std::uint32_t> idx;   // argmax routing for pool layers
    std::vector<std::uint8_t> mask;   // dropout keep mask
};

template <typename T>
struct ForwardCache {
    std::vector<TensorT<T>> branch_inputs;
    std::vector<std::vector<LayerState<T>>> branch_states;
    TensorT<T> concat;
    std::vector<LayerState<T>> head_states;
    RunMode mode = RunMode::Eval;
};

template <typename T>
struct Gradients {
    ParamSet<T> params;
    // d(score)/d(conv layer output), keyed "b<i>.l<j>"; filled on request for Grad-CAM.
    std::map<std::string, TensorT<T>> conv_activation_grads;
};

// He-normal initialization, deterministic in seed.
template <typename T>
ParamSet<T> init_params(const ModelSpec& spec, std::uint64_t seed);

// inputs[i] feeds branch i (shape must match the branch selector). rng is only
// consulted for dropout in Train mode.
template <typename T>
TensorT<T> forward(const ModelSpec& spec, const ParamSet<T>& params,
                   const std::vector<TensorT<T>>& inputs, RunMode mode, std::mt19937_64* rng,
                   ForwardCache<T>* cache);

template <typename T>
Gradients<T> backward(const ModelSpec& spec, const ParamSet<T>& params, const ForwardCache<T>& cache,
                      const TensorT<T>& d_logits, bool keep_conv_grads = false);

// Softmax cross-entropy; d_logits (optional) receives softmax - one_hot.
template <typename T>
double softmax_cross_entropy(const TensorT<T>& logits, int target, TensorT<T>* d_logits);

template <typename T>
std::vector<double> softmax(const TensorT<T>& logits);

// Trained model: architecture plus f32 parameters.
struct Model {
    ModelSpec spec;
    ParamSet<float> params;
};

Model build_model(const ModelSpec& spec, std::uint64_t seed);

// argmax of softmax with ties broken toward the lowest class id.
std::pair<int, std::vector<double>> predict(const Model& model, const std::vector<TensorF>& inputs);

}  // namespace wrenchval::nn
