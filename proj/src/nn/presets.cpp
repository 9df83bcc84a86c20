#include "wrenchval/nn/presets.hpp"

#include "wrenchval/errors.hpp"

namespace wrenchval::nn {

Preset preset_from_string(const std::string& s) {
    if (s == "ffann") return Preset::FfAnn;
    if (s == "cnn1d") return Preset::Cnn1d;
    if (s == "cnn2d") return Preset::Cnn2d;
    if (s == "hybrid-all") return Preset::HybridAll;
    if (s == "hybrid-unit-measure") return Preset::HybridUnitMeasure;
    if (s == "hybrid-specific") return Preset::HybridSpecific;
    throw DataError("unknown preset '" + s +
                    "' (expected ffann|cnn1d|cnn2d|hybrid-all|hybrid-unit-measure|hybrid-specific)");
}

std::string to_string(Preset p) {
    switch (p) {
        case Preset::FfAnn: return "ffann";
        case Preset::Cnn1d: return "cnn1d";
        case Preset::Cnn2d: return "cnn2d";
        case Preset::HybridAll: return "hybrid-all";
        case Preset::HybridUnitMeasure: return "hybrid-unit-measure";
        case Preset::HybridSpecific: return "hybrid-specific";
    }
    return "cnn1d";
}

namespace {

std::vector<int> all_channels() { return {0, 1, 2, 3, 4, 5, 6, 7, 8}; }

BranchSpec conv1d_branch(std::vector<int> channels) {
    // tight strides keep the last feature map detailed enough for useful
    // attribution maps (receptive field 96 samples, hop 16)
    BranchSpec b;
    b.input = InputKind::Signals1d;
    b.channels = std::move(channels);
    b.layers = {LayerSpec::conv1d(16, 20, 4), LayerSpec::relu(),
                LayerSpec::conv1d(32, 20, 4), LayerSpec::relu(),
                LayerSpec::global_max_pool(), LayerSpec::dropout(0.25)};
    return b;
}

BranchSpec conv1d_branch_shallow(std::vector<int> channels) {
    BranchSpec b;
    b.input = InputKind::Signals1d;
    b.channels = std::move(channels);
    b.layers = {LayerSpec::conv1d(16, 40, 10), LayerSpec::relu(), LayerSpec::global_max_pool(),
                LayerSpec::dropout(0.25)};
    return b;
}

BranchSpec scaleogram_branch_wide(std::vector<int> channels) {
    // time kernel stays within the 20-100 sample range on the 800-wide axis
    BranchSpec b;
    b.input = InputKind::Scaleograms2d;
    b.channels = std::move(channels);
    b.layers = {LayerSpec::conv2d(8, 16, 48, 8, 24), LayerSpec::relu(),
                LayerSpec::maxpool2d(2),
                LayerSpec::conv2d(16, 3, 5, 1, 2),   LayerSpec::relu(),
                LayerSpec::global_max_pool(),        LayerSpec::dropout(0.3)};
    return b;
}

BranchSpec scaleogram_branch_shallow(std::vector<int> channels) {
    BranchSpec b;
    b.input = InputKind::Scaleograms2d;
    b.channels = std::move(channels);
    b.layers = {LayerSpec::conv2d(8, 16, 48, 8, 24), LayerSpec::relu(), LayerSpec::global_max_pool(),
                LayerSpec::dropout(0.3)};
    return b;
}

BranchSpec cnn2d_branch(std::vector<int> channels) {
    BranchSpec b;
    b.input = InputKind::Scaleograms2d;
    b.channels = std::move(channels);
    b.layers = {LayerSpec::conv2d(8, 12, 40, 6, 12), LayerSpec::relu(),
                LayerSpec::maxpool2d(2),
                LayerSpec::conv2d(16, 4, 10, 2, 5),  LayerSpec::relu(),
                LayerSpec::global_max_pool(),        LayerSpec::dropout(0.3)};
    return b;
}

std::vector<LayerSpec> head_taper(int first, std::size_t n_classes) {
    std::vector<LayerSpec> head;
    head.push_back(LayerSpec{LayerKind::Concat});
    if (first > 16) {
        head.push_back(LayerSpec::dense(first));
        head.push_back(LayerSpec::relu());
    }
    head.push_back(LayerSpec::dense(16));
    head.push_back(LayerSpec::relu());
    head.push_back(LayerSpec::dense(static_cast<int>(n_classes)));
    return head;
}

}  // namespace

ModelSpec build_preset(ActionKind action_kind, Preset preset,
                       const std::map<int, std::string>& class_map, int input_len) {
    if (class_map.size() < 2) throw DataError("presets need at least 2 classes");
    ModelSpec spec;
    spec.action_kind = action_kind;
    spec.input_len = input_len;
    spec.class_map = class_map;
    const std::size_t C = class_map.size();

    switch (preset) {
        case Preset::FfAnn: {
            BranchSpec b;
            b.input = InputKind::Signals1d;
            b.channels = all_channels();
            b.layers = {LayerSpec::flatten(), LayerSpec::dense(256), LayerSpec::relu(),
                        LayerSpec::dropout(0.3)};
            spec.branches = {b};
            spec.head = head_taper(64, C);
            break;
        }
        case Preset::Cnn1d: {
            spec.branches = {conv1d_branch({0, 1, 2}), conv1d_branch({3, 4, 5}),
                             conv1d_branch({6, 7, 8})};
            spec.head = head_taper(48, C);
            break;
        }
        case Preset::Cnn2d: {
            spec.branches = {cnn2d_branch({0, 1, 2, 3, 4, 5})};
            spec.head = head_taper(16, C);
            break;
        }
        case Preset::HybridAll: {
            BranchSpec signals;
            signals.input = InputKind::Signals1d;
            signals.channels = all_channels();
            signals.layers = conv1d_branch({}).layers;
            spec.branches = {signals, scaleogram_branch_wide({0, 1, 2, 3, 4, 5})};
            spec.head = head_taper(32, C);
            break;
        }
        case Preset::HybridUnitMeasure: {
            spec.branches = {conv1d_branch_shallow({0, 1, 2}),
                             conv1d_branch_shallow({3, 4, 5}),
                             conv1d_branch_shallow({6, 7, 8}),
                             scaleogram_branch_shallow({0, 1, 2}),
                             scaleogram_branch_shallow({3, 4, 5})};
            spec.head = head_taper(32, C);
            break;
        }
        case Preset::HybridSpecific: {
            spec.branches = {conv1d_branch({0, 1, 2}), conv1d_branch({3, 4, 5}),
                             conv1d_branch({6, 7, 8}), cnn2d_branch({0, 1, 2, 3, 4, 5})};
            spec.head = head_taper(48, C);
            break;
        }
    }

    infer_shapes(spec);  // fail fast on geometry mistakes
    return spec;
}

}  // namespace wrenchval::nn
