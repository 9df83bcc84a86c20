#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wrenchval/record.hpp"
#include "wrenchval/tensor.hpp"

namespace wrenchval {

enum class Normalization { None, Standard, MinMax };

Normalization normalization_from_string(const std::string& s);
std::string to_string(Normalization n);

// Full preprocessing recipe. Serialized as JSON; every default below is also
// the file default.
struct PipelineConfig {
    double cutoff_hz = 30.0;
    int filter_order = 4;  // even
    int energy_window = 300;
    double t_hi = 0.38, t_mid = 0.22, t_lo = 0.12;
    int proximity = 60;
    int far_gap = 200;
    int extract_len = 800;
    Normalization normalization = Normalization::Standard;
    std::optional<std::vector<int>> selected_channels;  // nullopt = all 9
    std::vector<int> energy_channels = {0, 1, 2};       // forces drive transient detection
    bool transform_to_tcp = false;

    void validate(double sample_rate_hz) const;
    std::vector<int> channels_or_all() const;

    nlohmann::json to_json() const;
    static PipelineConfig from_json(const nlohmann::json& j);
};

// Per-channel normalization statistics, fitted on the training split only.
struct NormStats {
    Normalization mode = Normalization::Standard;
    std::vector<double> center;       // mean (Standard) or min (MinMax)
    std::vector<double> scale;        // std (Standard) or max-min (MinMax)
    std::vector<bool> constant;       // flagged channels pass through unchanged

    std::size_t n_channels() const { return center.size(); }
    nlohmann::json to_json() const;
    static NormStats from_json(const nlohmann::json& j);
};

// --- Butterworth low-pass ----------------------------------------------------

struct Biquad {
    double b0, b1, b2, a1, a2;
};

struct ButterCascade {
    std::vector<Biquad> sections;
    double max_pole_radius = 0.0;
};

// Bilinear transform with prewarping; order must be even and positive.
ButterCascade design_butterworth(double cutoff_hz, int order, double sample_rate_hz);

// Single causal pass (zero initial state). Exposed for frequency-response tests.
Tensor lowpass_forward(const Tensor& x, double cutoff_hz, int order, double sample_rate_hz);

// Zero-phase application: odd-reflection padding, forward pass, reversed
// backward pass, trim. x is [C, N] (or [N]); output matches the input shape.
Tensor lowpass_filter(const Tensor& x, double cutoff_hz, int order, double sample_rate_hz);

// --- transient isolation -------------------------------------------------------

// e[i] = sum over the window ending at i of the selected-channel squared norm;
// the first window-1 entries use the truncated prefix.
Tensor short_time_energy(const Tensor& x, int window, const std::vector<int>& channels);

struct ThresholdIndices {
    std::int64_t hi, mid, lo;
};

// First index where energy reaches each fraction of the maximum.
ThresholdIndices threshold_indices(const Tensor& energy, double t_hi, double t_mid, double t_lo);

std::int64_t select_onset(const ThresholdIndices& idx, int proximity = 60, int far_gap = 200);

// Slice [start, start+len); overruns are right-padded by edge replication.
Tensor extract_window(const Tensor& x, std::int64_t start, int len);

// --- normalization ---------------------------------------------------------------

// Fits per-channel stats over every sample of every window ([C, L] tensors).
NormStats fit_normalizer(const std::vector<Tensor>& windows, Normalization mode);
// Convenience: runs the pipeline minus normalization over a training split and fits.
NormStats fit_pipeline_normalizer(const Dataset& train, const PipelineConfig& cfg);

// x is [C, L]; channel row i uses stats channel `channel_ids[i]` (defaults to i).
Tensor apply_normalizer(const Tensor& x, const NormStats& stats,
                        const std::vector<int>* channel_ids = nullptr);

// --- full pipeline -----------------------------------------------------------------

struct PipelineResult {
    Tensor window;  // [C_sel, extract_len]
    std::int64_t start = 0;
    ThresholdIndices thresholds{0, 0, 0};
};

// Ordered application: optional base->TCP transform, low-pass, transient
// isolation, channel selection, normalization. stats is required iff
// cfg.normalization != None.
PipelineResult run_pipeline(const ActionRecord& rec, const PipelineConfig& cfg,
                            const NormStats* stats = nullptr);

}  // namespace wrenchval
