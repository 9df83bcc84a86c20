#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wrenchval/nn/train.hpp"
#include "wrenchval/pipeline.hpp"
#include "wrenchval/record.hpp"
#include "wrenchval/wavelet.hpp"

namespace wrenchval::cli {

// Per-branch model inputs for one record: the shared pipeline stage runs once,
// branch selectors slice signals or transform scaleograms from it.
std::vector<nn::Sample> build_samples(const Dataset& ds, const nn::ModelSpec& model,
                                      const PipelineConfig& cfg, const NormStats* stats,
                                      const CwtConfig& cwt_cfg,
                                      std::vector<PipelineResult>* pipeline_out = nullptr);

struct GenerateArgs {
    std::optional<std::filesystem::path> spec_path;
    std::optional<std::string> action;
    std::optional<int> count;
    std::optional<double> imbalance;
    std::filesystem::path out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
};
int run_generate(const GenerateArgs& args);

struct PreprocessArgs {
    std::filesystem::path config_path;
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> stats_in;
    bool emit_scaleograms = false;
};
int run_preprocess(const PreprocessArgs& args);

struct TrainArgs {
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
    std::string preset = "cnn1d";
    std::optional<std::filesystem::path> model_config;
    std::optional<std::filesystem::path> pipeline_config;
    std::optional<std::filesystem::path> train_config;
    std::optional<std::filesystem::path> cwt_config;
    bool final_split = false;  // 70-30 instead of 60-20-20
    bool balance = false;
    std::uint64_t seed = 0;
};
int run_train(const TrainArgs& args);

struct EvalArgs {
    std::filesystem::path model_path;
    std::filesystem::path manifest_path;
    std::filesystem::path out_dir;
};
int run_eval(const EvalArgs& args);

struct ClassifyArgs {
    std::filesystem::path model_path;
    std::filesystem::path record_path;
    std::filesystem::path out_dir;
    bool explain = false;
};
int run_classify(const ClassifyArgs& args);

struct ExplainArgs {
    std::filesystem::path model_path;
    std::filesystem::path record_path;
    std::filesystem::path out_dir;
    std::optional<int> target_class;  // default: predicted class
};
int run_explain(const ExplainArgs& args);

}  // namespace wrenchval::cli
