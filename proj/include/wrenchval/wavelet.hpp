#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "wrenchval/tensor.hpp"

namespace wrenchval {

struct CwtConfig {
    int n_scales = 128;
    double scale_min = 1.0;   // samples
    double scale_max = 256.0; // geometric spacing between the two
    double omega0 = 6.0;
    int output_height = 128;
    bool energy_norm = true;  // 1/sqrt(a) amplitude convention; false = bare correlation sum

    void validate() const;
    nlohmann::json to_json() const;
    static CwtConfig from_json(const nlohmann::json& j);
};

// pi^(-1/4) * exp(i*omega0*t) * exp(-t^2/2)
std::complex<double> morlet(double t, double omega0);

std::vector<double> geometric_scales(const CwtConfig& cfg);

// |W[a,b]| before any normalization, rows = scale (n_scales) and cols = time.
// The input mean is removed before the transform.
Tensor cwt_magnitude_raw(const Tensor& x, const CwtConfig& cfg);

struct Scaleogram {
    Tensor values;  // [output_height, N] in [0,1]
    int source_channel = -1;
    std::vector<double> scales;
};

// Raw magnitudes resampled to output_height rows, then min-max normalized over
// the whole matrix. An all-zero signal yields an all-zero scaleogram.
Scaleogram cwt(const Tensor& x, const CwtConfig& cfg, int source_channel = -1);

// One normalized scaleogram per selected channel of x [C, N], stacked
// depth-wise into [K, output_height, N] (f32: these feed model branches).
TensorF scaleogram_stack(const Tensor& x, const CwtConfig& cfg, const std::vector<int>& channels);

// Row-major f32 binary + JSON header {shape, scales, channel}; returns the bin path.
std::filesystem::path save_scaleogram(const Scaleogram& s, const std::filesystem::path& base_path);
Scaleogram load_scaleogram(const std::filesystem::path& bin_path);
// Grayscale heatmap for documentation.
void save_scaleogram_png(const Scaleogram& s, const std::filesystem::path& path);

}  // namespace wrenchval
