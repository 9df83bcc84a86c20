#include "wrenchval/nn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wrenchval/errors.hpp"
#include "wrenchval/kernels.hpp"

namespace wrenchval::nn {

std::string param_name(int branch, int layer, const char* which) {
    return "b" + std::to_string(branch) + ".l" + std::to_string(layer) + "." + which;
}

std::string head_param_name(int layer, const char* which) {
    return "head.l" + std::to_string(layer) + "." + which;
}

namespace {

template <typename T>
struct StackContext {
    const std::vector<LayerSpec>* layers;
    std::string prefix;  // "b0" or "head"
};

template <typename T>
const TensorT<T>& layer_input(const TensorT<T>& stack_input,
                              const std::vector<LayerState<T>>& states, std::size_t l) {
    return l == 0 ? stack_input : states[l - 1].out;
}

// ---- forward primitives -----------------------------------------------------

template <typename T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b) {
    const std::size_t out_dim = w.dim(0), in_dim = w.dim(1);
    TensorT<T> y({out_dim});
    for (std::size_t j = 0; j < out_dim; ++j)
        y[j] = kernels::dot(w.row(j), x.data(), in_dim) + b[j];
    return y;
}

template <typename T>
TensorT<T> conv1d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b, int stride) {
    const std::size_t C = x.dim(0), L = x.dim(1);
    const std::size_t F = w.dim(0), K = w.dim(2);
    if (w.dim(1) != C) throw DataError("conv1d weight/input channel mismatch");
    if (K > L) throw DataError("conv1d kernel exceeds input length");
    const std::size_t out_len = (L - K) / static_cast<std::size_t>(stride) + 1;

    TensorT<T> y({F, out_len});
    for (std::size_t f = 0; f < F; ++f) {
        T* yrow = y.row(f);
        std::fill(yrow, yrow + out_len, b[f]);
        for (std::size_t c = 0; c < C; ++c) {
            const T* wrow = w.data() + (f * C + c) * K;
            const T* xrow = x.row(c);
            for (std::size_t o = 0; o < out_len; ++o)
                yrow[o] += kernels::dot(wrow, xrow + o * static_cast<std::size_t>(stride), K);
        }
    }
    return y;
}

template <typename T>
TensorT<T> conv2d_forward(const TensorT<T>& x, const TensorT<T>& w, const TensorT<T>& b,
                          int stride_h, int stride_w) {
    const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
    const std::size_t F = w.dim(0), KH = w.dim(2), KW = w.dim(3);
    if (w.dim(1) != C) throw DataError("conv2d weight/input channel mismatch");
    const std::size_t OH = (H - KH) / static_cast<std::size_t>(stride_h) + 1;
    const std::size_t OW = (W - KW) / static_cast<std::size_t>(stride_w) + 1;

    TensorT<T> y({F, OH, OW});
    for (std::size_t f = 0; f < F; ++f) {
        T* yplane = y.row(f);
        std::fill(yplane, yplane + OH * OW, b[f]);
        for (std::size_t c = 0; c < C; ++c) {
            const T* wbase = w.data() + ((f * C + c) * KH) * KW;
            const T* xplane = x.row(c);
            for (std::size_t oh = 0; oh < OH; ++oh) {
                for (std::size_t kh = 0; kh < KH; ++kh) {
                    const T* xrow = xplane + (oh * static_cast<std::size_t>(stride_h) + kh) * W;
                    const T* wrow = wbase + kh * KW;
                    T* yrow = yplane + oh * OW;
                    for (std::size_t ow = 0; ow < OW; ++ow)
                        yrow[ow] += kernels::dot(wrow, xrow + ow * static_cast<std::size_t>(stride_w), KW);
                }
            }
        }
    }
    return y;
}

// ---- stack runner -------------------------------------------------------------

template <typename T>
TensorT<T> run_stack(const std::vector<LayerSpec>& layers, const std::string& prefix,
                     const ParamSet<T>& params, const TensorT<T>& input, RunMode mode,
                     std::mt19937_64* rng, std::vector<LayerState<T>>& states) {
    states.clear();
    states.resize(layers.size());
    TensorT<T> cur = input;

    for (std::size_t l = 0; l < layers.size(); ++l) {
        const LayerSpec& spec = layers[l];
        LayerState<T>& st = states[l];
        switch (spec.kind) {
            case LayerKind::Dense: {
                if (cur.rank() != 1)
                    throw DataError(prefix + ".l" + std::to_string(l) + ": dense input must be rank 1, got " +
                                    shape_string(cur.shape()));
                const auto& w = params.tensors.at(prefix + ".l" + std::to_string(l) + ".w");
                const auto& b = params.tensors.at(prefix + ".l" + std::to_string(l) + ".b");
                if (w.dim(1) != cur.size())
                    throw DataError(prefix + ".l" + std::to_string(l) + ": dense expects input width " +
                                    std::to_string(w.dim(1)) + ", got " + std::to_string(cur.size()));
                st.out = dense_forward(cur, w, b);
                break;
            }
            case LayerKind::Conv1d: {
                if (cur.rank() != 2)
                    throw DataError(prefix + ".l" + std::to_string(l) + ": conv1d input must be [C, L], got " +
                                    shape_string(cur.shape()));
                const auto& w = params.tensors.at(prefix + ".l" + std::to_string(l) + ".w");
                const auto& b = params.tensors.at(prefix + ".l" + std::to_string(l) + ".b");
                st.out = conv1d_forward(cur, w, b, spec.stride);
                break;
            }
            case LayerKind::Conv2d: {
                if (cur.rank() != 3)
                    throw DataError(prefix + ".l" + std::to_string(l) + ": conv2d input must be [C, H, W], got " +
                                    shape_string(cur.shape()));
                const auto& w = params.tensors.at(prefix + ".l" + std::to_string(l) + ".w");
                const auto& b = params.tensors.at(prefix + ".l" + std::to_string(l) + ".b");
                st.out = conv2d_forward(cur, w, b, spec.stride_h, spec.stride_w);
                break;
            }
            case LayerKind::MaxPool1d: {
                const std::size_t C = cur.dim(0), L = cur.dim(1);
                const auto p = static_cast<std::size_t>(spec.pool);
                const std::size_t out_len = L / p;
                st.out = TensorT<T>({C, out_len});
                st.idx.resize(C * out_len);
                for (std::size_t c = 0; c < C; ++c) {
                    const T* row = cur.row(c);
                    for (std::size_t o = 0; o < out_len; ++o) {
                        std::size_t best = o * p;
                        for (std::size_t k = 1; k < p; ++k)
                            if (row[o * p + k] > row[best]) best = o * p + k;
                        st.out.at(c, o) = row[best];
                        st.idx[c * out_len + o] = static_cast<std::uint32_t>(c * L + best);
                    }
                }
                break;
            }
            case LayerKind::MaxPool2d: {
                const std::size_t C = cur.dim(0), H = cur.dim(1), W = cur.dim(2);
                const auto p = static_cast<std::size_t>(spec.pool);
                const std::size_t OH = H / p, OW = W / p;
                st.out = TensorT<T>({C, OH, OW});
                st.idx.resize(C * OH * OW);
                for (std::size_t c = 0; c < C; ++c) {
                    const T* plane = cur.row(c);
                    for (std::size_t oh = 0; oh < OH; ++oh)
                        for (std::size_t ow = 0; ow < OW; ++ow) {
                            std::size_t best = (oh * p) * W + ow * p;
                            for (std::size_t kh = 0; kh < p; ++kh)
                                for (std::size_t kw = 0; kw < p; ++kw) {
                                    const std::size_t pos = (oh * p + kh) * W + ow * p + kw;
                                    if (plane[pos] > plane[best]) best = pos;
                                }
                            st.out.at(c, oh, ow) = plane[best];
                            st.idx[(c * OH + oh) * OW + ow] = static_cast<std::uint32_t>(c * H * W + best);
                        }
                }
                break;
            }
            case LayerKind::GlobalMaxPool: {
                const std::size_t C = cur.dim(0);
                const std::size_t plane = cur.size() / C;
                st.out = TensorT<T>({C});
                st.idx.resize(C);
                for (std::size_t c = 0; c < C; ++c) {
                    const T* row = cur.data() + c * plane;
                    std::size_t best = 0;
                    for (std::size_t i = 1; i < plane; ++i)
                        if (row[i] > row[best]) best = i;
                    st.out[c] = row[best];
                    st.idx[c] = static_cast<std::uint32_t>(c * plane + best);
                }
                break;
            }
            case LayerKind::Relu: {
                st.out = cur;
                for (std::size_t i = 0; i < st.out.size(); ++i)
                    if (st.out[i] < T(0)) st.out[i] = T(0);
                break;
            }
            case LayerKind::Dropout: {
                st.out = cur;
                if (mode == RunMode::Train && spec.rate > 0.0) {
                    if (!rng)
                        throw DataError(prefix + ".l" + std::to_string(l) +
                                        ": dropout in train mode needs an rng");
                    st.mask.resize(cur.size());
                    std::uniform_real_distribution<double> u(0.0, 1.0);
                    const T scale = static_cast<T>(1.0 / (1.0 - spec.rate));
                    for (std::size_t i = 0; i < cur.size(); ++i) {
                        const bool keep = u(*rng) >= spec.rate;
                        st.mask[i] = keep ? 1 : 0;
                        st.out[i] = keep ? cur[i] * scale : T(0);
                    }
                }
                break;
            }
            case LayerKind::Flatten: {
                st.out = TensorT<T>({cur.size()},
                                    std::vector<T>(cur.data(), cur.data() + cur.size()));
                break;
            }
            case LayerKind::Concat:
                if (prefix != "head" || l != 0)
                    throw DataError("concat may only start the head");
                st.out = cur;  // merge happened outside the stack
                break;
        }
        cur = st.out;
    }
    return cur;
}

// ---- backward ------------------------------------------------------------------

template <typename T>
TensorT<T> backprop_stack(const std::vector<LayerSpec>& layers, const std::string& prefix,
                          const ParamSet<T>& params, const TensorT<T>& stack_input,
                          const std::vector<LayerState<T>>& states, const TensorT<T>& d_out,
                          Gradients<T>& grads, bool keep_conv_grads) {
    TensorT<T> d_cur = d_out;

    for (std::size_t li = layers.size(); li-- > 0;) {
        const LayerSpec& spec = layers[li];
        const LayerState<T>& st = states[li];
        const TensorT<T>& x = layer_input(stack_input, states, li);

        switch (spec.kind) {
            case LayerKind::Dense: {
                const std::string base = prefix + ".l" + std::to_string(li);
                const auto& w = params.tensors.at(base + ".w");
                auto& dw = grads.params.tensors[base + ".w"];
                auto& db = grads.params.tensors[base + ".b"];
                if (dw.size() == 0) dw = TensorT<T>(w.shape());
                if (db.size() == 0) db = TensorT<T>({w.dim(0)});
                TensorT<T> dx({w.dim(1)});
                for (std::size_t j = 0; j < w.dim(0); ++j) {
                    const T g = d_cur[j];
                    if (g != T(0)) {
                        kernels::axpy(g, x.data(), dw.row(j), w.dim(1));
                        kernels::axpy(g, w.row(j), dx.data(), w.dim(1));
                    }
                    db[j] += g;
                }
                d_cur = std::move(dx);
                break;
            }
            case LayerKind::Conv1d: {
                const std::string base = prefix + ".l" + std::to_string(li);
                const auto& w = params.tensors.at(base + ".w");
                auto& dw = grads.params.tensors[base + ".w"];
                auto& db = grads.params.tensors[base + ".b"];
                if (dw.size() == 0) dw = TensorT<T>(w.shape());
                if (db.size() == 0) db = TensorT<T>({w.dim(0)});
                if (keep_conv_grads) grads.conv_activation_grads[base] = d_cur;

                const std::size_t C = x.dim(0), F = w.dim(0), K = w.dim(2);
                const std::size_t out_len = st.out.dim(1);
                const auto s = static_cast<std::size_t>(spec.stride);
                TensorT<T> dx(x.shape());
                for (std::size_t f = 0; f < F; ++f) {
                    const T* grow = d_cur.row(f);
                    for (std::size_t o = 0; o < out_len; ++o) db[f] += grow[o];
                    for (std::size_t c = 0; c < C; ++c) {
                        const T* xrow = x.row(c);
                        const T* wrow = w.data() + (f * C + c) * K;
                        T* dwrow = dw.data() + (f * C + c) * K;
                        T* dxrow = dx.row(c);
                        for (std::size_t o = 0; o < out_len; ++o) {
                            const T g = grow[o];
                            if (g == T(0)) continue;
                            kernels::axpy(g, xrow + o * s, dwrow, K);
                            kernels::axpy(g, wrow, dxrow + o * s, K);
                        }
                    }
                }
                d_cur = std::move(dx);
                break;
            }
            case LayerKind::Conv2d: {
                const std::string base = prefix + ".l" + std::to_string(li);
                const auto& w = params.tensors.at(base + ".w");
                auto& dw = grads.params.tensors[base + ".w"];
                auto& db = grads.params.tensors[base + ".b"];
                if (dw.size() == 0) dw = TensorT<T>(w.shape());
                if (db.size() == 0) db = TensorT<T>({w.dim(0)});
                if (keep_conv_grads) grads.conv_activation_grads[base] = d_cur;

                const std::size_t C = x.dim(0), W2 = x.dim(2);
                const std::size_t F = w.dim(0), KH = w.dim(2), KW = w.dim(3);
                const std::size_t OH = st.out.dim(1), OW = st.out.dim(2);
                const auto sh = static_cast<std::size_t>(spec.stride_h);
                const auto sw = static_cast<std::size_t>(spec.stride_w);
                TensorT<T> dx(x.shape());
                for (std::size_t f = 0; f < F; ++f) {
                    const T* gplane = d_cur.row(f);
                    for (std::size_t i = 0; i < OH * OW; ++i) db[f] += gplane[i];
                    for (std::size_t c = 0; c < C; ++c) {
                        const T* xplane = x.row(c);
                        T* dxplane = dx.row(c);
                        const T* wbase = w.data() + ((f * C + c) * KH) * KW;
                        T* dwbase = dw.data() + ((f * C + c) * KH) * KW;
                        for (std::size_t oh = 0; oh < OH; ++oh) {
                            const T* grow = gplane + oh * OW;
                            for (std::size_t kh = 0; kh < KH; ++kh) {
                                const std::size_t xr = (oh * sh + kh) * W2;
                                for (std::size_t ow = 0; ow < OW; ++ow) {
                                    const T g = grow[ow];
                                    if (g == T(0)) continue;
                                    kernels::axpy(g, xplane + xr + ow * sw, dwbase + kh * KW, KW);
                                    kernels::axpy(g, wbase + kh * KW, dxplane + xr + ow * sw, KW);
                                }
                            }
                        }
                    }
                }
                d_cur = std::move(dx);
                break;
            }
            case LayerKind::MaxPool1d:
            case LayerKind::MaxPool2d:
            case LayerKind::GlobalMaxPool: {
                TensorT<T> dx(x.shape());
                for (std::size_t i = 0; i < st.idx.size(); ++i) dx[st.idx[i]] += d_cur[i];
                d_cur = std::move(dx);
                break;
            }
            case LayerKind::Relu: {
                for (std::size_t i = 0; i < d_cur.size(); ++i)
                    if (st.out[i] <= T(0)) d_cur[i] = T(0);
                break;
            }
            case LayerKind::Dropout: {
                if (!st.mask.empty()) {
                    const T scale = static_cast<T>(1.0 / (1.0 - spec.rate));
                    for (std::size_t i = 0; i < d_cur.size(); ++i)
                        d_cur[i] = st.mask[i] ? d_cur[i] * scale : T(0);
                }
                break;
            }
            case LayerKind::Flatten: {
                d_cur = TensorT<T>(x.shape(),
                                   std::vector<T>(d_cur.data(), d_cur.data() + d_cur.size()));
                break;
            }
            case LayerKind::Concat:
                break;
        }
    }
    return d_cur;
}

}  // namespace

// ---- public entry points -------------------------------------------------------

template <typename T>
ParamSet<T> init_params(const ModelSpec& spec, std::uint64_t seed) {
    const ModelShapes shapes = infer_shapes(spec);
    ParamSet<T> params;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto init_stack = [&](const std::vector<LayerSpec>& layers, const std::string& prefix,
                          std::vector<std::size_t> in,
                          const std::vector<std::vector<std::size_t>>& outs) {
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const LayerSpec& layer = layers[l];
            const std::string base = prefix + ".l" + std::to_string(l);
            if (layer.kind == LayerKind::Dense) {
                const std::size_t fan_in = in[0];
                TensorT<T> w({static_cast<std::size_t>(layer.units), fan_in});
                // the logit layer starts at zero so class evidence is entirely
                // gradient-built; hidden layers use He init
                const bool logit_layer = prefix == "head" && l + 1 == layers.size();
                const double sd = logit_layer ? 0.0 : std::sqrt(2.0 / static_cast<double>(fan_in));
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(sd * gauss(rng));
                params.tensors.emplace(base + ".w", std::move(w));
                params.tensors.emplace(base + ".b", TensorT<T>({static_cast<std::size_t>(layer.units)}));
            } else if (layer.kind == LayerKind::Conv1d) {
                const std::size_t fan_in = in[0] * static_cast<std::size_t>(layer.kernel);
                TensorT<T> w({static_cast<std::size_t>(layer.filters), in[0],
                              static_cast<std::size_t>(layer.kernel)});
                const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(sd * gauss(rng));
                params.tensors.emplace(base + ".w", std::move(w));
                params.tensors.emplace(base + ".b", TensorT<T>({static_cast<std::size_t>(layer.filters)}));
            } else if (layer.kind == LayerKind::Conv2d) {
                const std::size_t fan_in =
                    in[0] * static_cast<std::size_t>(layer.kernel_h) * static_cast<std::size_t>(layer.kernel_w);
                TensorT<T> w({static_cast<std::size_t>(layer.filters), in[0],
                              static_cast<std::size_t>(layer.kernel_h),
                              static_cast<std::size_t>(layer.kernel_w)});
                const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>(sd * gauss(rng));
                params.tensors.emplace(base + ".w", std::move(w));
                params.tensors.emplace(base + ".b", TensorT<T>({static_cast<std::size_t>(layer.filters)}));
            }
            in = outs[l];
        }
    };

    for (std::size_t b = 0; b < spec.branches.size(); ++b)
        init_stack(spec.branches[b].layers, "b" + std::to_string(b), shapes.branch_inputs[b],
                   shapes.branch_layers[b]);
    init_stack(spec.head, "head", {shapes.concat_dim}, shapes.head_layers);
    return params;
}

template <typename T>
TensorT<T> forward(const ModelSpec& spec, const ParamSet<T>& params,
                   const std::vector<TensorT<T>>& inputs, RunMode mode, std::mt19937_64* rng,
                   ForwardCache<T>* cache) {
    if (inputs.size() != spec.branches.size())
        throw DataError("model has " + std::to_string(spec.branches.size()) + " branches but got " +
                        std::to_string(inputs.size()) + " inputs");

    ForwardCache<T> local;
    ForwardCache<T>& c = cache ? *cache : local;
    c.mode = mode;
    c.branch_inputs = inputs;
    c.branch_states.assign(spec.branches.size(), {});

    const ModelShapes shapes = infer_shapes(spec);
    std::vector<TensorT<T>> branch_outs;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
        if (inputs[b].shape() != shapes.branch_inputs[b])
            throw DataError("branch " + std::to_string(b) + " expects input " +
                            shape_string(shapes.branch_inputs[b]) + ", got " +
                            shape_string(inputs[b].shape()));
        branch_outs.push_back(run_stack(spec.branches[b].layers, "b" + std::to_string(b), params,
                                        inputs[b], mode, rng, c.branch_states[b]));
    }

    TensorT<T> concat({shapes.concat_dim});
    std::size_t off = 0;
    for (const auto& out : branch_outs) {
        std::copy(out.data(), out.data() + out.size(), concat.data() + off);
        off += out.size();
    }
    c.concat = concat;

    return run_stack(spec.head, "head", params, concat, mode, rng, c.head_states);
}

template <typename T>
Gradients<T> backward(const ModelSpec& spec, const ParamSet<T>& params, const ForwardCache<T>& cache,
                      const TensorT<T>& d_logits, bool keep_conv_grads) {
    if (cache.branch_states.size() != spec.branches.size() || cache.head_states.size() != spec.head.size())
        throw DataError("forward cache does not match this model");

    Gradients<T> grads;
    const TensorT<T> d_concat = backprop_stack(spec.head, "head", params, cache.concat,
                                               cache.head_states, d_logits, grads, keep_conv_grads);

    std::size_t off = 0;
    for (std::size_t b = 0; b < spec.branches.size(); ++b) {
        const TensorT<T>& bout = cache.branch_states[b].back().out;
        TensorT<T> d_branch({bout.size()});
        std::copy(d_concat.data() + off, d_concat.data() + off + bout.size(), d_branch.data());
        off += bout.size();
        backprop_stack(spec.branches[b].layers, "b" + std::to_string(b), params,
                       cache.branch_inputs[b], cache.branch_states[b], d_branch, grads,
                       keep_conv_grads);
    }

    // zero-fill gradients for parameters with no incoming signal so the
    // gradient map always mirrors the parameter map
    for (const auto& [name, tensor] : params.tensors)
        if (grads.params.tensors.find(name) == grads.params.tensors.end())
            grads.params.tensors.emplace(name, TensorT<T>(tensor.shape()));
    return grads;
}

template <typename T>
std::vector<double> softmax(const TensorT<T>& logits) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < logits.size(); ++i) mx = std::max(mx, static_cast<double>(logits[i]));
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(static_cast<double>(logits[i]) - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

template <typename T>
double softmax_cross_entropy(const TensorT<T>& logits, int target, TensorT<T>* d_logits) {
    if (target < 0 || static_cast<std::size_t>(target) >= logits.size())
        throw DataError("cross entropy target class out of range");
    const std::vector<double> p = softmax(logits);
    const double loss = -std::log(std::max(p[static_cast<std::size_t>(target)], 1e-300));
    if (d_logits) {
        *d_logits = TensorT<T>({logits.size()});
        for (std::size_t i = 0; i < logits.size(); ++i)
            (*d_logits)[i] = static_cast<T>(p[i] - (static_cast<int>(i) == target ? 1.0 : 0.0));
    }
    return loss;
}

Model build_model(const ModelSpec& spec, std::uint64_t seed) {
    Model m;
    m.spec = spec;
    m.params = init_params<float>(spec, seed);
    const std::size_t count = m.params.count();
    if (count != parameter_count(spec))
        throw NumericError("parameter accounting mismatch");  // would indicate a shape bug
    if (count > spec.param_cap)
        throw DataError("model has " + std::to_string(count) + " parameters, cap is " +
                        std::to_string(spec.param_cap));
    return m;
}

std::pair<int, std::vector<double>> predict(const Model& model, const std::vector<TensorF>& inputs) {
    const TensorF logits = forward<float>(model.spec, model.params, inputs, RunMode::Eval, nullptr, nullptr);
    std::vector<double> p = softmax(logits);
    int best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = static_cast<int>(i);
    return {best, p};
}

// explicit instantiations: f32 for training/inference, f64 for gradient checks
template struct ParamSet<float>;
template struct ParamSet<double>;
template ParamSet<float> init_params<float>(const ModelSpec&, std::uint64_t);
template ParamSet<double> init_params<double>(const ModelSpec&, std::uint64_t);
template TensorT<float> forward<float>(const ModelSpec&, const ParamSet<float>&,
                                       const std::vector<TensorT<float>>&, RunMode, std::mt19937_64*,
                                       ForwardCache<float>*);
template TensorT<double> forward<double>(const ModelSpec&, const ParamSet<double>&,
                                         const std::vector<TensorT<double>>&, RunMode,
                                         std::mt19937_64*, ForwardCache<double>*);
template Gradients<float> backward<float>(const ModelSpec&, const ParamSet<float>&,
                                          const ForwardCache<float>&, const TensorT<float>&, bool);
template Gradients<double> backward<double>(const ModelSpec&, const ParamSet<double>&,
                                            const ForwardCache<double>&, const TensorT<double>&, bool);
template double softmax_cross_entropy<float>(const TensorT<float>&, int, TensorT<float>*);
template double softmax_cross_entropy<double>(const TensorT<double>&, int, TensorT<double>*);
template std::vector<double> softmax<float>(const TensorT<float>&);
template std::vector<double> softmax<double>(const TensorT<double>&);

}  // namespace wrenchval::nn
