#include "wrenchval/explain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "wrenchval/errors.hpp"
#include "wrenchval/png.hpp"

namespace wrenchval {

using nn::ForwardCache;
using nn::Gradients;
using nn::LayerKind;
using nn::Model;
using nn::RunMode;

namespace {

struct CamRaw {
    std::vector<double> map;  // flattened weighted feature map, pre-resample
    std::vector<std::size_t> map_shape;
    std::string layer_name;
    double jump_t = 1.0, center0_t = 0.0;  // cell -> input-sample mapping, time axis
    double jump_s = 1.0, center0_s = 0.0;  // scale axis (2-D branches)
};

int find_last_conv(const nn::BranchSpec& branch, LayerKind kind) {
    for (int l = static_cast<int>(branch.layers.size()) - 1; l >= 0; --l)
        if (branch.layers[static_cast<std::size_t>(l)].kind == kind) return l;
    return -1;
}

// Receptive-field geometry of the attribution layer's cells: cell j covers
// input samples [j*jump, j*jump + rf), so it is drawn centered there.
struct AxisGeom {
    double jump = 1.0, rf = 1.0;
    double center0() const { return (rf - 1.0) / 2.0; }
};

void fold_layer(AxisGeom& g, int kernel, int stride) {
    g.rf += (kernel - 1) * g.jump;
    g.jump *= stride;
}

std::pair<AxisGeom, AxisGeom> branch_geometry(const nn::BranchSpec& branch, int upto_layer) {
    AxisGeom time, scale;
    for (int l = 0; l <= upto_layer; ++l) {
        const nn::LayerSpec& spec = branch.layers[static_cast<std::size_t>(l)];
        switch (spec.kind) {
            case LayerKind::Conv1d: fold_layer(time, spec.kernel, spec.stride); break;
            case LayerKind::Conv2d:
                fold_layer(scale, spec.kernel_h, spec.stride_h);
                fold_layer(time, spec.kernel_w, spec.stride_w);
                break;
            case LayerKind::MaxPool1d: fold_layer(time, spec.pool, spec.pool); break;
            case LayerKind::MaxPool2d:
                fold_layer(scale, spec.pool, spec.pool);
                fold_layer(time, spec.pool, spec.pool);
                break;
            default: break;
        }
    }
    return {time, scale};
}

CamRaw weighted_feature_map(const Model& model, const std::vector<TensorF>& inputs, int target_class,
                            std::size_t branch, LayerKind conv_kind, const GradCamOptions& opts) {
    if (branch >= model.spec.branches.size()) throw DataError("branch index out of range");
    if (target_class < 0 || static_cast<std::size_t>(target_class) >= model.spec.n_classes())
        throw DataError("target class out of range");
    const int conv_layer = find_last_conv(model.spec.branches[branch], conv_kind);
    if (conv_layer < 0)
        throw DataError("branch " + std::to_string(branch) + " has no " +
                        nn::to_string(conv_kind) + " layer to attribute on");

    ForwardCache<float> cache;
    const TensorF logits =
        nn::forward<float>(model.spec, model.params, inputs, RunMode::Eval, nullptr, &cache);

    TensorF d_logits({logits.size()});
    if (opts.probability_target) {
        const std::vector<double> p = nn::softmax(logits);
        const double pt = p[static_cast<std::size_t>(target_class)];
        for (std::size_t i = 0; i < logits.size(); ++i) {
            const double delta = static_cast<int>(i) == target_class ? 1.0 : 0.0;
            d_logits[i] = static_cast<float>(pt * (delta - p[i]));
        }
    } else {
        d_logits[static_cast<std::size_t>(target_class)] = 1.0f;
    }

    const Gradients<float> grads =
        nn::backward<float>(model.spec, model.params, cache, d_logits, /*keep_conv_grads=*/true);

    const std::string key = "b" + std::to_string(branch) + ".l" + std::to_string(conv_layer);
    const TensorF& activation = cache.branch_states[branch][static_cast<std::size_t>(conv_layer)].out;
    const auto it = grads.conv_activation_grads.find(key);
    if (it == grads.conv_activation_grads.end())
        throw NumericError("missing activation gradient for " + key);
    const TensorF& grad = it->second;

    const std::size_t F = activation.dim(0);
    const std::size_t plane = activation.size() / F;

    CamRaw raw;
    raw.layer_name = key;
    raw.map.assign(plane, 0.0);
    raw.map_shape.assign(activation.shape().begin() + 1, activation.shape().end());
    for (std::size_t f = 0; f < F; ++f) {
        const float* grow = grad.data() + f * plane;
        double alpha;
        if (opts.weighting == CamWeighting::MaxPool) {
            alpha = grow[0];
            for (std::size_t i = 1; i < plane; ++i) alpha = std::max(alpha, static_cast<double>(grow[i]));
        } else {
            alpha = 0.0;
            for (std::size_t i = 0; i < plane; ++i) alpha += grow[i];
            alpha /= static_cast<double>(plane);
        }
        const float* arow = activation.data() + f * plane;
        for (std::size_t i = 0; i < plane; ++i) raw.map[i] += alpha * arow[i];
    }
    for (double& v : raw.map) v = std::max(0.0, v);

    const auto [time_geom, scale_geom] =
        branch_geometry(model.spec.branches[branch], conv_layer);
    raw.jump_t = time_geom.jump;
    raw.center0_t = time_geom.center0();
    raw.jump_s = scale_geom.jump;
    raw.center0_s = scale_geom.center0();
    return raw;
}

void normalize_map(Tensor& t) {
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) {
        mx = std::max(mx, t[i]);
        mn = std::min(mn, t[i]);
    }
    if (mx <= 0.0) {
        t.fill(0.0);  // zero map stays zero
        return;
    }
    if (mx - mn < 1e-30) {
        t.fill(1.0);  // constant positive map saturates
        return;
    }
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = (t[i] - mn) / (mx - mn);
}

// Linear interpolation over cell centers (center0 + j*jump); positions beyond
// the first/last center clamp, matching those cells' receptive-field reach.
double sample_aligned(const double* src, std::size_t n, double pos, double center0, double jump) {
    const double cell = (pos - center0) / jump;
    if (cell <= 0.0) return src[0];
    if (cell >= static_cast<double>(n - 1)) return src[n - 1];
    const auto lo = static_cast<std::size_t>(cell);
    const double w = cell - static_cast<double>(lo);
    return (1.0 - w) * src[lo] + w * src[lo + 1];
}

std::vector<double> resample_aligned(const std::vector<double>& src, std::size_t target,
                                     double center0, double jump) {
    std::vector<double> out(target);
    if (src.size() == 1) {
        std::fill(out.begin(), out.end(), src[0]);
        return out;
    }
    for (std::size_t i = 0; i < target; ++i)
        out[i] = sample_aligned(src.data(), src.size(), static_cast<double>(i), center0, jump);
    return out;
}

}  // namespace

Attribution gradcam_1d(const Model& model, const std::vector<TensorF>& inputs, int target_class,
                       std::size_t branch, const GradCamOptions& opts) {
    const CamRaw raw = weighted_feature_map(model, inputs, target_class, branch, LayerKind::Conv1d, opts);
    const auto input_len = static_cast<std::size_t>(model.spec.input_len);

    Attribution att;
    att.target_class = target_class;
    att.source_layer = raw.layer_name;
    att.values = Tensor({input_len}, resample_aligned(raw.map, input_len, raw.center0_t, raw.jump_t));
    normalize_map(att.values);
    return att;
}

Attribution gradcam_2d(const Model& model, const std::vector<TensorF>& inputs, int target_class,
                       std::size_t branch, const GradCamOptions& opts) {
    const CamRaw raw = weighted_feature_map(model, inputs, target_class, branch, LayerKind::Conv2d, opts);
    const std::size_t H = raw.map_shape[0], W = raw.map_shape[1];
    const auto out_h = static_cast<std::size_t>(model.spec.scaleogram_height);
    const auto out_w = static_cast<std::size_t>(model.spec.input_len);

    // bilinear resample [H, W] -> [out_h, out_w] over receptive-field centers
    Tensor up({out_h, out_w});
    std::vector<double> row_interp(W);
    for (std::size_t r = 0; r < out_h; ++r) {
        const double cy = (static_cast<double>(r) - raw.center0_s) / raw.jump_s;
        const std::size_t y0 = static_cast<std::size_t>(std::clamp(cy, 0.0, static_cast<double>(H - 1)));
        const std::size_t y1 = std::min(y0 + 1, H - 1);
        const double wy = std::clamp(cy - static_cast<double>(y0), 0.0, 1.0);
        for (std::size_t c = 0; c < W; ++c)
            row_interp[c] = (1.0 - wy) * raw.map[y0 * W + c] + wy * raw.map[y1 * W + c];
        for (std::size_t c = 0; c < out_w; ++c)
            up.at(r, c) = sample_aligned(row_interp.data(), W, static_cast<double>(c), raw.center0_t,
                                         raw.jump_t);
    }

    Attribution att;
    att.target_class = target_class;
    att.source_layer = raw.layer_name;
    att.values = std::move(up);
    normalize_map(att.values);
    return att;
}

std::pair<std::filesystem::path, std::filesystem::path> export_attribution(
    const Attribution& att, const Tensor& window, const std::vector<std::string>& channel_names,
    double sample_rate_hz, const std::filesystem::path& base_path) {
    if (window.rank() != 2) throw DataError("attribution export expects a [C, L] window");
    const std::size_t C = window.dim(0), L = window.dim(1);
    if (channel_names.size() != C) throw DataError("channel name count mismatch");
    const bool is_2d = att.values.rank() == 2;
    const std::size_t heat_len = is_2d ? att.values.dim(1) : att.values.dim(0);
    if (heat_len != L) throw DataError("attribution length does not match window");

    // column-wise max collapses a 2-D map onto the time axis for the CSV
    std::vector<double> heat(L);
    if (is_2d) {
        for (std::size_t c = 0; c < L; ++c) {
            double mx = 0.0;
            for (std::size_t r = 0; r < att.values.dim(0); ++r) mx = std::max(mx, att.values.at(r, c));
            heat[c] = mx;
        }
    } else {
        std::copy(att.values.data(), att.values.data() + L, heat.begin());
    }

    auto csv_path = base_path;
    csv_path.replace_extension(".csv");
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot write attribution csv: " + csv_path.string());
    out << "t";
    for (const auto& name : channel_names) out << ',' << name;
    out << ",heat\n";
    char buf[32];
    for (std::size_t i = 0; i < L; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(i) / sample_rate_hz);
        out << buf;
        for (std::size_t c = 0; c < C; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", window.at(c, i));
            out << ',' << buf;
        }
        std::snprintf(buf, sizeof buf, "%.9g", heat[i]);
        out << ',' << buf << '\n';
    }
    if (!out) throw DataError("attribution csv write failed: " + csv_path.string());

    // one panel per channel, heat as a white->red underlay, signal as a black polyline
    const int panel_h = 96;
    const int width = static_cast<int>(L);
    const int height = panel_h * static_cast<int>(C);
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3, 255);
    for (std::size_t c = 0; c < C; ++c) {
        const double* row = window.row(c);
        double lo = row[0], hi = row[0];
        for (std::size_t i = 1; i < L; ++i) {
            lo = std::min(lo, row[i]);
            hi = std::max(hi, row[i]);
        }
        const double span = hi - lo > 0 ? hi - lo : 1.0;
        const int y0 = static_cast<int>(c) * panel_h;
        for (std::size_t x = 0; x < L; ++x) {
            const double h = heat[x];
            const auto g = static_cast<std::uint8_t>(255.0 * (1.0 - 0.85 * h));
            for (int y = y0; y < y0 + panel_h; ++y) {
                const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
                rgb[o] = 255;
                rgb[o + 1] = g;
                rgb[o + 2] = g;
            }
            const double norm = (row[x] - lo) / span;
            int py = y0 + panel_h - 4 - static_cast<int>(norm * (panel_h - 8));
            py = std::clamp(py, y0, y0 + panel_h - 1);
            const std::size_t o = (static_cast<std::size_t>(py) * width + x) * 3;
            rgb[o] = rgb[o + 1] = rgb[o + 2] = 0;
        }
        // panel divider
        for (std::size_t x = 0; x < L && c + 1 < C; ++x) {
            const std::size_t o = ((static_cast<std::size_t>(y0) + panel_h - 1) * width + x) * 3;
            rgb[o] = rgb[o + 1] = rgb[o + 2] = 200;
        }
    }
    auto png_path = base_path;
    png_path.replace_extension(".png");
    write_png_rgb(png_path, width, height, rgb);
    return {csv_path, png_path};
}

}  // namespace wrenchval
