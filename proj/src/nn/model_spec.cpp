#include "wrenchval/nn/model_spec.hpp"

#include <numeric>

#include "wrenchval/errors.hpp"

namespace wrenchval::nn {

using nlohmann::json;

std::string to_string(LayerKind k) {
    switch (k) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv1d: return "conv1d";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::MaxPool1d: return "maxpool1d";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::GlobalMaxPool: return "globalmaxpool";
        case LayerKind::Dropout: return "dropout";
        case LayerKind::Relu: return "relu";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::Concat: return "concat";
    }
    return "relu";
}

LayerKind layer_kind_from_string(const std::string& s) {
    if (s == "dense") return LayerKind::Dense;
    if (s == "conv1d") return LayerKind::Conv1d;
    if (s == "conv2d") return LayerKind::Conv2d;
    if (s == "maxpool1d") return LayerKind::MaxPool1d;
    if (s == "maxpool2d") return LayerKind::MaxPool2d;
    if (s == "globalmaxpool") return LayerKind::GlobalMaxPool;
    if (s == "dropout") return LayerKind::Dropout;
    if (s == "relu") return LayerKind::Relu;
    if (s == "flatten") return LayerKind::Flatten;
    if (s == "concat") return LayerKind::Concat;
    throw DataError("unknown layer kind: '" + s + "'");
}

LayerSpec LayerSpec::dense(int units) {
    LayerSpec l;
    l.kind = LayerKind::Dense;
    l.units = units;
    return l;
}
LayerSpec LayerSpec::conv1d(int filters, int kernel, int stride) {
    LayerSpec l;
    l.kind = LayerKind::Conv1d;
    l.filters = filters;
    l.kernel = kernel;
    l.stride = stride;
    return l;
}
LayerSpec LayerSpec::conv2d(int filters, int kh, int kw, int sh, int sw) {
    LayerSpec l;
    l.kind = LayerKind::Conv2d;
    l.filters = filters;
    l.kernel_h = kh;
    l.kernel_w = kw;
    l.stride_h = sh;
    l.stride_w = sw;
    return l;
}
LayerSpec LayerSpec::maxpool1d(int pool) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool1d;
    l.pool = pool;
    return l;
}
LayerSpec LayerSpec::maxpool2d(int pool) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool2d;
    l.pool = pool;
    return l;
}
LayerSpec LayerSpec::global_max_pool() {
    LayerSpec l;
    l.kind = LayerKind::GlobalMaxPool;
    return l;
}
LayerSpec LayerSpec::dropout(double rate) {
    LayerSpec l;
    l.kind = LayerKind::Dropout;
    l.rate = rate;
    return l;
}
LayerSpec LayerSpec::relu() {
    LayerSpec l;
    l.kind = LayerKind::Relu;
    return l;
}
LayerSpec LayerSpec::flatten() {
    LayerSpec l;
    l.kind = LayerKind::Flatten;
    return l;
}

json LayerSpec::to_json() const {
    json j;
    j["kind"] = nn::to_string(kind);
    switch (kind) {
        case LayerKind::Dense: j["units"] = units; break;
        case LayerKind::Conv1d:
            j["filters"] = filters;
            j["kernel"] = kernel;
            j["stride"] = stride;
            break;
        case LayerKind::Conv2d:
            j["filters"] = filters;
            j["kernel"] = {kernel_h, kernel_w};
            j["stride"] = {stride_h, stride_w};
            break;
        case LayerKind::MaxPool1d:
        case LayerKind::MaxPool2d: j["pool"] = pool; break;
        case LayerKind::Dropout: j["rate"] = rate; break;
        default: break;
    }
    return j;
}

LayerSpec LayerSpec::from_json(const json& j) {
    LayerSpec l;
    try {
        l.kind = layer_kind_from_string(j.at("kind").get<std::string>());
        switch (l.kind) {
            case LayerKind::Dense: l.units = j.at("units").get<int>(); break;
            case LayerKind::Conv1d:
                l.filters = j.at("filters").get<int>();
                l.kernel = j.at("kernel").get<int>();
                l.stride = j.at("stride").get<int>();
                break;
            case LayerKind::Conv2d:
                l.filters = j.at("filters").get<int>();
                l.kernel_h = j.at("kernel")[0].get<int>();
                l.kernel_w = j.at("kernel")[1].get<int>();
                l.stride_h = j.at("stride")[0].get<int>();
                l.stride_w = j.at("stride")[1].get<int>();
                break;
            case LayerKind::MaxPool1d:
            case LayerKind::MaxPool2d: l.pool = j.at("pool").get<int>(); break;
            case LayerKind::Dropout: l.rate = j.at("rate").get<double>(); break;
            default: break;
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid layer spec: ") + e.what());
    }
    return l;
}

std::string to_string(InputKind k) {
    return k == InputKind::Signals1d ? "signals1d" : "scaleograms2d";
}

json BranchSpec::to_json() const {
    json j;
    j["input"] = nn::to_string(input);
    j["channels"] = channels;
    json layers_json = json::array();
    for (const auto& l : layers) layers_json.push_back(l.to_json());
    j["layers"] = layers_json;
    return j;
}

BranchSpec BranchSpec::from_json(const json& j) {
    BranchSpec b;
    try {
        const auto kind = j.at("input").get<std::string>();
        if (kind == "signals1d")
            b.input = InputKind::Signals1d;
        else if (kind == "scaleograms2d")
            b.input = InputKind::Scaleograms2d;
        else
            throw DataError("unknown branch input kind: '" + kind + "'");
        b.channels = j.at("channels").get<std::vector<int>>();
        for (const auto& l : j.at("layers")) b.layers.push_back(LayerSpec::from_json(l));
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid branch spec: ") + e.what());
    }
    return b;
}

json ModelSpec::to_json() const {
    json j;
    j["format_version"] = 1;
    j["action_kind"] = wrenchval::to_string(action_kind);
    j["input_len"] = input_len;
    j["scaleogram_height"] = scaleogram_height;
    json branches_json = json::array();
    for (const auto& b : branches) branches_json.push_back(b.to_json());
    j["branches"] = branches_json;
    json head_json = json::array();
    for (const auto& l : head) head_json.push_back(l.to_json());
    j["head"] = head_json;
    json cm = json::object();
    for (const auto& [cid, name] : class_map) cm[std::to_string(cid)] = name;
    j["class_map"] = cm;
    j["param_cap"] = param_cap;
    return j;
}

ModelSpec ModelSpec::from_json(const json& j) {
    ModelSpec s;
    const int version = j.value("format_version", 1);
    if (version != 1)
        throw DataError("unsupported model spec format_version " + std::to_string(version));
    try {
        s.action_kind = action_kind_from_string(j.at("action_kind").get<std::string>());
        s.input_len = j.at("input_len").get<int>();
        s.scaleogram_height = j.value("scaleogram_height", 128);
        for (const auto& b : j.at("branches")) s.branches.push_back(BranchSpec::from_json(b));
        for (const auto& l : j.at("head")) s.head.push_back(LayerSpec::from_json(l));
        for (auto& [key, val] : j.at("class_map").items())
            s.class_map[std::stoi(key)] = val.get<std::string>();
        s.param_cap = j.value("param_cap", s.param_cap);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid model spec: ") + e.what());
    }
    return s;
}

namespace {

std::vector<std::size_t> layer_output_shape(const LayerSpec& l, const std::vector<std::size_t>& in,
                                            const std::string& where) {
    auto fail = [&](const std::string& msg) -> void {
        throw DataError(where + " (" + to_string(l.kind) + "): " + msg + " for input " +
                        shape_string(in));
    };
    switch (l.kind) {
        case LayerKind::Dense: {
            if (in.size() != 1) fail("dense layers need a rank-1 input");
            if (l.units < 1) fail("dense units must be >= 1");
            return {static_cast<std::size_t>(l.units)};
        }
        case LayerKind::Conv1d: {
            if (in.size() != 2) fail("conv1d needs [C, L]");
            if (l.filters < 1 || l.kernel < 1 || l.stride < 1) fail("bad conv1d geometry");
            if (static_cast<std::size_t>(l.kernel) > in[1]) fail("kernel exceeds input length");
            const std::size_t out_len = (in[1] - static_cast<std::size_t>(l.kernel)) /
                                            static_cast<std::size_t>(l.stride) + 1;
            return {static_cast<std::size_t>(l.filters), out_len};
        }
        case LayerKind::Conv2d: {
            if (in.size() != 3) fail("conv2d needs [C, H, W]");
            if (l.filters < 1 || l.kernel_h < 1 || l.kernel_w < 1 || l.stride_h < 1 || l.stride_w < 1)
                fail("bad conv2d geometry");
            if (static_cast<std::size_t>(l.kernel_h) > in[1] ||
                static_cast<std::size_t>(l.kernel_w) > in[2])
                fail("kernel exceeds input plane");
            const std::size_t oh = (in[1] - static_cast<std::size_t>(l.kernel_h)) /
                                       static_cast<std::size_t>(l.stride_h) + 1;
            const std::size_t ow = (in[2] - static_cast<std::size_t>(l.kernel_w)) /
                                       static_cast<std::size_t>(l.stride_w) + 1;
            return {static_cast<std::size_t>(l.filters), oh, ow};
        }
        case LayerKind::MaxPool1d: {
            if (in.size() != 2) fail("maxpool1d needs [C, L]");
            if (l.pool < 1 || static_cast<std::size_t>(l.pool) > in[1]) fail("bad pool size");
            return {in[0], in[1] / static_cast<std::size_t>(l.pool)};
        }
        case LayerKind::MaxPool2d: {
            if (in.size() != 3) fail("maxpool2d needs [C, H, W]");
            if (l.pool < 1 || static_cast<std::size_t>(l.pool) > in[1] ||
                static_cast<std::size_t>(l.pool) > in[2])
                fail("bad pool size");
            return {in[0], in[1] / static_cast<std::size_t>(l.pool), in[2] / static_cast<std::size_t>(l.pool)};
        }
        case LayerKind::GlobalMaxPool: {
            if (in.size() < 2) fail("globalmaxpool needs rank >= 2");
            return {in[0]};
        }
        case LayerKind::Dropout: {
            if (!(l.rate >= 0.0 && l.rate < 1.0)) fail("dropout rate must lie in [0,1)");
            return in;
        }
        case LayerKind::Relu: return in;
        case LayerKind::Flatten: {
            std::size_t n = 1;
            for (std::size_t d : in) n *= d;
            return {n};
        }
        case LayerKind::Concat: fail("concat may only start the head");
    }
    fail("unhandled layer kind");
    return {};
}

}  // namespace

ModelShapes infer_shapes(const ModelSpec& spec) {
    if (spec.branches.empty()) throw DataError("model needs at least one branch");
    if (spec.class_map.empty()) throw DataError("model needs a class map");
    if (spec.input_len < 1) throw DataError("model input_len must be positive");
    {
        // logits are indexed by class id, so ids must be dense 0..C-1
        int expect = 0;
        for (const auto& [cid, name] : spec.class_map)
            if (cid != expect++)
                throw DataError("model class ids must be contiguous from 0; missing id " +
                                std::to_string(expect - 1));
    }

    ModelShapes shapes;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
        const BranchSpec& branch = spec.branches[b];
        const std::string where_branch = "branch " + std::to_string(b);
        if (branch.channels.empty()) throw DataError(where_branch + ": no input channels");
        if (branch.layers.empty()) throw DataError(where_branch + ": no layers");

        std::vector<std::size_t> shape;
        if (branch.input == InputKind::Signals1d)
            shape = {branch.channels.size(), static_cast<std::size_t>(spec.input_len)};
        else
            shape = {branch.channels.size(), static_cast<std::size_t>(spec.scaleogram_height),
                     static_cast<std::size_t>(spec.input_len)};
        shapes.branch_inputs.push_back(shape);

        std::vector<std::vector<std::size_t>> per_layer;
        for (std::size_t l = 0; l < branch.layers.size(); ++l) {
            shape = layer_output_shape(branch.layers[l],
                                       shape, where_branch + " layer " + std::to_string(l));
            per_layer.push_back(shape);
        }
        if (shape.size() != 1)
            throw DataError(where_branch + " must end in a rank-1 feature vector, got " +
                            shape_string(shape));
        shapes.concat_dim += shape[0];
        shapes.branch_layers.push_back(std::move(per_layer));
    }

    if (spec.head.empty()) throw DataError("model head is empty");
    std::vector<std::size_t> shape = {shapes.concat_dim};
    for (std::size_t l = 0; l < spec.head.size(); ++l) {
        const LayerSpec& layer = spec.head[l];
        if (layer.kind == LayerKind::Concat) {
            if (l != 0) throw DataError("head layer " + std::to_string(l) + ": concat must be first");
            shapes.head_layers.push_back(shape);
            continue;
        }
        shape = layer_output_shape(layer, shape, "head layer " + std::to_string(l));
        shapes.head_layers.push_back(shape);
    }
    if (shape.size() != 1 || shape[0] != spec.n_classes())
        throw DataError("head must end in a Dense layer of width n_classes=" +
                        std::to_string(spec.n_classes()) + ", got " + shape_string(shape));
    if (spec.head.back().kind != LayerKind::Dense)
        throw DataError("final head layer must be Dense (raw logits)");
    return shapes;
}

namespace {

std::size_t layer_param_count(const LayerSpec& l, const std::vector<std::size_t>& in) {
    switch (l.kind) {
        case LayerKind::Dense:
            return static_cast<std::size_t>(l.units) * in[0] + static_cast<std::size_t>(l.units);
        case LayerKind::Conv1d:
            return static_cast<std::size_t>(l.filters) * in[0] * static_cast<std::size_t>(l.kernel) +
                   static_cast<std::size_t>(l.filters);
        case LayerKind::Conv2d:
            return static_cast<std::size_t>(l.filters) * in[0] * static_cast<std::size_t>(l.kernel_h) *
                       static_cast<std::size_t>(l.kernel_w) +
                   static_cast<std::size_t>(l.filters);
        default: return 0;
    }
}

}  // namespace

std::size_t parameter_count(const ModelSpec& spec) {
    const ModelShapes shapes = infer_shapes(spec);
    std::size_t total = 0;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
        std::vector<std::size_t> in = shapes.branch_inputs[b];
        for (std::size_t l = 0; l < spec.branches[b].layers.size(); ++l) {
            total += layer_param_count(spec.branches[b].layers[l], in);
            in = shapes.branch_layers[b][l];
        }
    }
    std::vector<std::size_t> in = {shapes.concat_dim};
    for (std::size_t l = 0; l < spec.head.size(); ++l) {
        total += layer_param_count(spec.head[l], in);
        in = shapes.head_layers[l];
    }
    return total;
}

std::vector<std::string> lint_model(const ModelSpec& spec) {
    std::vector<std::string> issues;
    ModelShapes shapes;
    try {
        shapes = infer_shapes(spec);
    } catch (const DataError& e) {
        issues.push_back(std::string("shape inference failed: ") + e.what());
        return issues;
    }

    auto check_common = [&](const LayerSpec& l, const std::string& where) {
        if (l.kind == LayerKind::Conv1d) {
            if (l.kernel < 20 || l.kernel > 100)
                issues.push_back(where + ": conv1d kernel " + std::to_string(l.kernel) +
                                 " outside [20, 100]");
            const double lo = 0.1 * l.kernel, hi = 0.5 * l.kernel;
            if (l.stride < lo || l.stride > hi)
                issues.push_back(where + ": conv1d stride " + std::to_string(l.stride) +
                                 " outside 10-50% of kernel " + std::to_string(l.kernel));
        }
        if (l.kind == LayerKind::Dropout && (l.rate < 0.2 || l.rate > 0.4))
            issues.push_back(where + ": dropout rate " + std::to_string(l.rate) + " outside [0.2, 0.4]");
    };

    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
        for (std::size_t l = 0; l < spec.branches[b].layers.size(); ++l)
            check_common(spec.branches[b].layers[l],
                         "branch " + std::to_string(b) + " layer " + std::to_string(l));
        if (spec.branches[b].input == InputKind::Scaleograms2d) {
            for (int c : spec.branches[b].channels)
                if (c > 5)
                    issues.push_back("branch " + std::to_string(b) +
                                     ": scaleogram branch uses non-force/torque channel " +
                                     std::to_string(c));
        }
    }

    // dense taper: head widths non-increasing, floor 16 before the output
    std::vector<int> widths;
    for (const auto& l : spec.head) {
        check_common(l, "head");
        if (l.kind == LayerKind::Dense) widths.push_back(l.units);
    }
    if (widths.empty()) {
        issues.push_back("head has no dense layers");
    } else {
        for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
            if (widths[i + 1] > widths[i])
                issues.push_back("head dense widths increase (" + std::to_string(widths[i]) + " -> " +
                                 std::to_string(widths[i + 1]) + ")");
            if (widths[i] < 16)
                issues.push_back("head dense width " + std::to_string(widths[i]) +
                                 " below the taper floor of 16");
        }
        if (widths.back() != static_cast<int>(spec.n_classes()))
            issues.push_back("final dense width != number of classes");
    }

    const std::size_t params = parameter_count(spec);
    if (params > spec.param_cap)
        issues.push_back("parameter count " + std::to_string(params) + " exceeds cap " +
                         std::to_string(spec.param_cap));
    return issues;
}

}  // namespace wrenchval::nn
