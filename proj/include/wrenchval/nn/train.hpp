#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrenchval/metrics.hpp"
#include "wrenchval/nn/graph.hpp"

namespace wrenchval::nn {

struct AdamConfig {
    double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double weight_decay = 1e-4;  // decoupled; keeps unused weights from lingering at init
};

struct TrainConfig {
    AdamConfig adam;
    int batch_size = 16;
    int epochs = 60;
    int patience = 10;  // early stop on validation macro-F1; <=0 disables
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// One preprocessed record: per-branch input tensors plus the label.
struct Sample {
    std::vector<TensorF> inputs;
    int class_id = 0;
    std::string record_id;
    bool augmented = false;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_macro_f1 = 0.0;
};

struct TrainResult {
    std::vector<EpochStats> history;
    int best_epoch = -1;
    double best_val_f1 = 0.0;
};

// Minimizes softmax cross-entropy with Adam; keeps the best-validation-F1
// weights (falls back to final weights when val is empty). Deterministic per
// cfg.seed. Throws NumericError naming the last finite epoch on divergence.
TrainResult train(Model& model, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set, const TrainConfig& cfg);

// Confusion matrix + mean loss of a sample set under the current weights.
struct EvalStats {
    ConfusionMatrix cm;
    double mean_loss = 0.0;
};
EvalStats evaluate(const Model& model, const std::vector<Sample>& samples);

void write_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& path);

}  // namespace wrenchval::nn
