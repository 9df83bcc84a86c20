#include "wrenchval/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wrenchval/errors.hpp"
#include "wrenchval/rotation.hpp"

namespace wrenchval {

using nlohmann::json;

Normalization normalization_from_string(const std::string& s) {
    if (s == "none") return Normalization::None;
    if (s == "standard") return Normalization::Standard;
    if (s == "minmax") return Normalization::MinMax;
    throw DataError("unknown normalization mode: '" + s + "'");
}

std::string to_string(Normalization n) {
    switch (n) {
        case Normalization::None: return "none";
        case Normalization::Standard: return "standard";
        case Normalization::MinMax: return "minmax";
    }
    return "none";
}

void PipelineConfig::validate(double sample_rate_hz) const {
    if (!(cutoff_hz > 0) || cutoff_hz >= sample_rate_hz / 2.0)
        throw DataError("cutoff_hz must lie in (0, sample_rate/2)");
    if (filter_order <= 0 || filter_order % 2 != 0)
        throw DataError("filter_order must be a positive even integer");
    if (energy_window <= 0) throw DataError("energy_window must be positive");
    if (!(0 < t_lo && t_lo < t_mid && t_mid < t_hi && t_hi < 1))
        throw DataError("thresholds must satisfy 0 < t_lo < t_mid < t_hi < 1");
    if (extract_len <= 0) throw DataError("extract_len must be positive");
    if (proximity < 0 || far_gap < 0) throw DataError("proximity/far_gap must be nonnegative");
    if (energy_channels.empty()) throw DataError("energy_channels must be nonempty");
    for (int c : energy_channels)
        if (c < 0 || c >= kNumChannels) throw DataError("energy channel index out of range");
    if (selected_channels) {
        if (selected_channels->empty()) throw DataError("selected_channels must be nonempty");
        for (int c : *selected_channels)
            if (c < 0 || c >= kNumChannels) throw DataError("selected channel index out of range");
    }
}

std::vector<int> PipelineConfig::channels_or_all() const {
    if (selected_channels) return *selected_channels;
    std::vector<int> all(kNumChannels);
    for (int c = 0; c < kNumChannels; ++c) all[c] = c;
    return all;
}

json PipelineConfig::to_json() const {
    json j;
    j["cutoff_hz"] = cutoff_hz;
    j["filter_order"] = filter_order;
    j["energy_window"] = energy_window;
    j["thresholds"] = {t_hi, t_mid, t_lo};
    j["proximity"] = proximity;
    j["far_gap"] = far_gap;
    j["extract_len"] = extract_len;
    j["normalization"] = to_string(normalization);
    if (selected_channels)
        j["selected_channels"] = *selected_channels;
    else
        j["selected_channels"] = nullptr;
    j["energy_channels"] = energy_channels;
    j["transform_to_tcp"] = transform_to_tcp;
    return j;
}

PipelineConfig PipelineConfig::from_json(const json& j) {
    PipelineConfig c;
    try {
        c.cutoff_hz = j.value("cutoff_hz", c.cutoff_hz);
        c.filter_order = j.value("filter_order", c.filter_order);
        c.energy_window = j.value("energy_window", c.energy_window);
        if (j.contains("thresholds")) {
            auto t = j.at("thresholds");
            if (!t.is_array() || t.size() != 3) throw DataError("thresholds must be [t_hi, t_mid, t_lo]");
            c.t_hi = t[0].get<double>();
            c.t_mid = t[1].get<double>();
            c.t_lo = t[2].get<double>();
        }
        c.proximity = j.value("proximity", c.proximity);
        c.far_gap = j.value("far_gap", c.far_gap);
        c.extract_len = j.value("extract_len", c.extract_len);
        if (j.contains("normalization"))
            c.normalization = normalization_from_string(j.at("normalization").get<std::string>());
        if (j.contains("selected_channels") && !j.at("selected_channels").is_null())
            c.selected_channels = j.at("selected_channels").get<std::vector<int>>();
        if (j.contains("energy_channels"))
            c.energy_channels = j.at("energy_channels").get<std::vector<int>>();
        c.transform_to_tcp = j.value("transform_to_tcp", c.transform_to_tcp);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid pipeline config: ") + e.what());
    }
    return c;
}

json NormStats::to_json() const {
    json j;
    j["mode"] = wrenchval::to_string(mode);
    j["center"] = center;
    j["scale"] = scale;
    std::vector<int> flags(constant.size());
    for (std::size_t i = 0; i < constant.size(); ++i) flags[i] = constant[i] ? 1 : 0;
    j["constant"] = flags;
    return j;
}

NormStats NormStats::from_json(const json& j) {
    NormStats s;
    try {
        s.mode = normalization_from_string(j.at("mode").get<std::string>());
        s.center = j.at("center").get<std::vector<double>>();
        s.scale = j.at("scale").get<std::vector<double>>();
        auto flags = j.at("constant").get<std::vector<int>>();
        s.constant.assign(flags.size(), false);
        for (std::size_t i = 0; i < flags.size(); ++i) s.constant[i] = flags[i] != 0;
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid normalizer stats: ") + e.what());
    }
    if (s.center.size() != s.scale.size() || s.center.size() != s.constant.size())
        throw DataError("normalizer stats arrays disagree in length");
    return s;
}

// --- Butterworth -------------------------------------------------------------

ButterCascade design_butterworth(double cutoff_hz, int order, double sample_rate_hz) {
    if (!(cutoff_hz > 0) || cutoff_hz >= sample_rate_hz / 2.0)
        throw DataError("cutoff must lie in (0, Nyquist)");
    if (order <= 0 || order % 2 != 0) throw DataError("filter order must be positive and even");

    const double K = std::tan(std::numbers::pi * cutoff_hz / sample_rate_hz);
    ButterCascade cas;
    for (int k = 0; k < order / 2; ++k) {
        const double c = 2.0 * std::sin(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * order));
        const double d = 1.0 + c * K + K * K;
        Biquad s;
        s.b0 = K * K / d;
        s.b1 = 2.0 * s.b0;
        s.b2 = s.b0;
        s.a1 = 2.0 * (K * K - 1.0) / d;
        s.a2 = (1.0 - c * K + K * K) / d;
        cas.sections.push_back(s);

        const double disc = s.a1 * s.a1 - 4.0 * s.a2;
        double radius;
        if (disc < 0.0)
            radius = std::sqrt(s.a2);
        else {
            const double r1 = std::abs((-s.a1 + std::sqrt(disc)) / 2.0);
            const double r2 = std::abs((-s.a1 - std::sqrt(disc)) / 2.0);
            radius = std::max(r1, r2);
        }
        cas.max_pole_radius = std::max(cas.max_pole_radius, radius);
    }
    return cas;
}

namespace {

void biquad_pass(const Biquad& s, double* x, std::size_t n) {
    // Direct Form II transposed, zero initial state
    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double in = x[i];
        const double out = s.b0 * in + w1;
        w1 = s.b1 * in - s.a1 * out + w2;
        w2 = s.b2 * in - s.a2 * out;
        x[i] = out;
    }
}

void cascade_pass(const ButterCascade& cas, double* x, std::size_t n) {
    for (const Biquad& s : cas.sections) biquad_pass(s, x, n);
}

Tensor as_2d(const Tensor& x) {
    if (x.rank() == 1) return Tensor({1, x.dim(0)}, std::vector<double>(x.data(), x.data() + x.size()));
    if (x.rank() == 2) return x;
    throw DataError("filter input must be [N] or [C, N]");
}

// Startup transients decay like max_pole_radius^k; pad until they are below
// double precision noise, capped by the signal length.
std::size_t pad_length(const ButterCascade& cas, std::size_t n, int order) {
    const std::size_t floor_pad = 3 * (2 * static_cast<std::size_t>(order) + 1);
    double rho = std::clamp(cas.max_pole_radius, 1e-6, 1.0 - 1e-9);
    const auto decay_pad = static_cast<std::size_t>(std::ceil(std::log(1e-14) / std::log(rho)));
    return std::min(n - 1, std::max(floor_pad, decay_pad));
}

}  // namespace

Tensor lowpass_forward(const Tensor& x, double cutoff_hz, int order, double sample_rate_hz) {
    const ButterCascade cas = design_butterworth(cutoff_hz, order, sample_rate_hz);
    Tensor out = as_2d(x);
    const std::size_t n = out.dim(1);
    if (n <= static_cast<std::size_t>(3 * order))
        throw DataError("signal too short for filter order (need N > 3*order)");
    for (std::size_t c = 0; c < out.dim(0); ++c) cascade_pass(cas, out.row(c), n);
    return x.rank() == 1 ? Tensor({n}, std::vector<double>(out.data(), out.data() + n)) : out;
}

Tensor lowpass_filter(const Tensor& x, double cutoff_hz, int order, double sample_rate_hz) {
    const ButterCascade cas = design_butterworth(cutoff_hz, order, sample_rate_hz);
    Tensor in2d = as_2d(x);
    const std::size_t n = in2d.dim(1);
    if (n <= static_cast<std::size_t>(3 * order))
        throw DataError("signal too short for filter order (need N > 3*order)");

    const std::size_t pad = pad_length(cas, n, order);
    const std::size_t m = n + 2 * pad;
    std::vector<double> buf(m);

    Tensor out = in2d;
    for (std::size_t c = 0; c < in2d.dim(0); ++c) {
        const double* row = in2d.row(c);
        // odd reflection about both endpoints
        for (std::size_t i = 0; i < pad; ++i) buf[i] = 2.0 * row[0] - row[pad - i];
        std::copy(row, row + n, buf.begin() + static_cast<std::ptrdiff_t>(pad));
        for (std::size_t i = 0; i < pad; ++i) buf[pad + n + i] = 2.0 * row[n - 1] - row[n - 2 - i];

        cascade_pass(cas, buf.data(), m);
        std::reverse(buf.begin(), buf.end());
        cascade_pass(cas, buf.data(), m);
        std::reverse(buf.begin(), buf.end());

        std::copy(buf.begin() + static_cast<std::ptrdiff_t>(pad),
                  buf.begin() + static_cast<std::ptrdiff_t>(pad + n), out.row(c));
    }
    return x.rank() == 1 ? Tensor({n}, std::vector<double>(out.data(), out.data() + n)) : out;
}

// --- transient isolation ------------------------------------------------------

Tensor short_time_energy(const Tensor& x, int window, const std::vector<int>& channels) {
    if (x.rank() != 2) throw DataError("short_time_energy expects [C, N]");
    if (channels.empty()) throw DataError("short_time_energy needs at least one channel");
    const std::size_t C = x.dim(0), n = x.dim(1);
    for (int c : channels)
        if (c < 0 || static_cast<std::size_t>(c) >= C)
            throw DataError("energy channel index out of range");
    if (window <= 0 || static_cast<std::size_t>(window) > n)
        throw DataError("energy window must lie in [1, N]");

    // compensated prefix sums of the per-sample squared norm
    std::vector<double> prefix(n + 1, 0.0);
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int c : channels) {
            const double v = x.at(static_cast<std::size_t>(c), i);
            s += v * v;
        }
        const double y = s - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        prefix[i + 1] = sum;
    }

    Tensor e({n});
    const auto w = static_cast<std::size_t>(window);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = (i + 1 >= w) ? i + 1 - w : 0;
        e.at(i) = std::max(0.0, prefix[i + 1] - prefix[lo]);
    }
    return e;
}

ThresholdIndices threshold_indices(const Tensor& energy, double t_hi, double t_mid, double t_lo) {
    if (energy.rank() != 1 || energy.size() == 0) throw DataError("energy must be a nonempty vector");
    double peak = 0.0;
    for (std::size_t i = 0; i < energy.size(); ++i) peak = std::max(peak, energy[i]);
    if (!(peak > 0.0)) throw NoTransientError();

    auto first_crossing = [&](double frac) -> std::int64_t {
        const double level = frac * peak;
        for (std::size_t i = 0; i < energy.size(); ++i)
            if (energy[i] >= level) return static_cast<std::int64_t>(i);
        return static_cast<std::int64_t>(energy.size() - 1);  // unreachable: peak itself crosses
    };
    return ThresholdIndices{first_crossing(t_hi), first_crossing(t_mid), first_crossing(t_lo)};
}

std::int64_t select_onset(const ThresholdIndices& idx, int proximity, int far_gap) {
    if (idx.hi < idx.mid || idx.mid < idx.lo)
        throw DataError("threshold indices must satisfy hi >= mid >= lo");
    const std::int64_t spread = idx.hi - idx.lo;
    if (spread <= proximity) return idx.mid;
    if (spread > far_gap) return idx.hi;  // smaller indices are likely disturbances
    return idx.lo;
}

Tensor extract_window(const Tensor& x, std::int64_t start, int len) {
    if (x.rank() != 2) throw DataError("extract_window expects [C, N]");
    const std::size_t C = x.dim(0), n = x.dim(1);
    if (len <= 0) throw DataError("window length must be positive");
    if (start < 0 || static_cast<std::size_t>(start) >= n)
        throw DataError("window start " + std::to_string(start) + " outside signal of length " +
                        std::to_string(n));

    Tensor out({C, static_cast<std::size_t>(len)});
    for (std::size_t c = 0; c < C; ++c) {
        const double* src = x.row(c);
        double* dst = out.row(c);
        for (int i = 0; i < len; ++i) {
            const std::size_t j = static_cast<std::size_t>(start) + static_cast<std::size_t>(i);
            dst[i] = src[std::min(j, n - 1)];  // edge replication past the end
        }
    }
    return out;
}

// --- normalization ------------------------------------------------------------

NormStats fit_normalizer(const std::vector<Tensor>& windows, Normalization mode) {
    if (mode == Normalization::None) throw DataError("cannot fit a normalizer with mode 'none'");
    if (windows.empty()) throw DataError("cannot fit a normalizer on an empty training set");
    const std::size_t C = windows.front().dim(0);
    for (const auto& w : windows)
        if (w.rank() != 2 || w.dim(0) != C)
            throw DataError("normalizer windows must all be [C, L] with equal C");

    NormStats st;
    st.mode = mode;
    st.center.assign(C, 0.0);
    st.scale.assign(C, 1.0);
    st.constant.assign(C, false);

    if (mode == Normalization::Standard) {
        std::vector<double> sum(C, 0.0), sum2(C, 0.0);
        std::size_t total = 0;
        for (const auto& w : windows) {
            const std::size_t L = w.dim(1);
            total += L;
            for (std::size_t c = 0; c < C; ++c) {
                const double* row = w.row(c);
                for (std::size_t i = 0; i < L; ++i) {
                    sum[c] += row[i];
                    sum2[c] += row[i] * row[i];
                }
            }
        }
        for (std::size_t c = 0; c < C; ++c) {
            const double mean = sum[c] / static_cast<double>(total);
            const double var = std::max(0.0, sum2[c] / static_cast<double>(total) - mean * mean);
            const double sd = std::sqrt(var);
            if (sd < 1e-12) {
                st.constant[c] = true;  // pass-through
            } else {
                st.center[c] = mean;
                st.scale[c] = sd;
            }
        }
    } else {
        std::vector<double> mn(C, std::numeric_limits<double>::infinity());
        std::vector<double> mx(C, -std::numeric_limits<double>::infinity());
        for (const auto& w : windows) {
            const std::size_t L = w.dim(1);
            for (std::size_t c = 0; c < C; ++c) {
                const double* row = w.row(c);
                for (std::size_t i = 0; i < L; ++i) {
                    mn[c] = std::min(mn[c], row[i]);
                    mx[c] = std::max(mx[c], row[i]);
                }
            }
        }
        for (std::size_t c = 0; c < C; ++c) {
            if (mx[c] - mn[c] < 1e-12) {
                st.constant[c] = true;
            } else {
                st.center[c] = mn[c];
                st.scale[c] = mx[c] - mn[c];
            }
        }
    }
    return st;
}

NormStats fit_pipeline_normalizer(const Dataset& train, const PipelineConfig& cfg) {
    if (train.records.empty()) throw DataError("cannot fit a normalizer on an empty training set");
    PipelineConfig stage = cfg;
    stage.normalization = Normalization::None;
    stage.selected_channels.reset();  // stats cover all channels; selection subsets at apply time
    std::vector<Tensor> windows;
    windows.reserve(train.records.size());
    for (const auto& rec : train.records) windows.push_back(run_pipeline(rec, stage).window);
    return fit_normalizer(windows, cfg.normalization);
}

Tensor apply_normalizer(const Tensor& x, const NormStats& stats, const std::vector<int>* channel_ids) {
    if (stats.mode == Normalization::None) return x;
    if (x.rank() != 2) throw DataError("apply_normalizer expects [C, L]");
    const std::size_t C = x.dim(0), L = x.dim(1);

    std::vector<int> ids;
    if (channel_ids) {
        ids = *channel_ids;
    } else {
        ids.resize(C);
        for (std::size_t c = 0; c < C; ++c) ids[c] = static_cast<int>(c);
    }
    if (ids.size() != C) throw DataError("normalizer channel id list does not match row count");

    Tensor out = x;
    for (std::size_t c = 0; c < C; ++c) {
        const auto sc = static_cast<std::size_t>(ids[c]);
        if (sc >= stats.n_channels()) throw DataError("normalizer stats missing channel " + std::to_string(ids[c]));
        if (stats.constant[sc]) continue;
        const double center = stats.center[sc], scale = stats.scale[sc];
        double* row = out.row(c);
        for (std::size_t i = 0; i < L; ++i) row[i] = (row[i] - center) / scale;
    }
    return out;
}

// --- full pipeline ---------------------------------------------------------------

PipelineResult run_pipeline(const ActionRecord& rec, const PipelineConfig& cfg, const NormStats* stats) {
    rec.validate();
    cfg.validate(rec.sample_rate_hz);
    if (cfg.normalization != Normalization::None && stats == nullptr)
        throw DataError("pipeline requires fitted normalizer stats for record '" + rec.id + "'");

    Tensor signal = cfg.transform_to_tcp ? transform_wrench_channels(rec.channels, rec.tcp_rotvec)
                                         : rec.channels;
    signal = lowpass_filter(signal, cfg.cutoff_hz, cfg.filter_order, rec.sample_rate_hz);

    const int window = std::min<int>(cfg.energy_window, static_cast<int>(rec.length()));
    const Tensor energy = short_time_energy(signal, window, cfg.energy_channels);

    PipelineResult res;
    try {
        res.thresholds = threshold_indices(energy, cfg.t_hi, cfg.t_mid, cfg.t_lo);
    } catch (const NoTransientError&) {
        throw NoTransientError(rec.id);
    }
    res.start = select_onset(res.thresholds, cfg.proximity, cfg.far_gap);

    Tensor full = extract_window(signal, res.start, cfg.extract_len);

    const std::vector<int> sel = cfg.channels_or_all();
    Tensor picked({sel.size(), static_cast<std::size_t>(cfg.extract_len)});
    for (std::size_t i = 0; i < sel.size(); ++i)
        std::copy(full.row(static_cast<std::size_t>(sel[i])),
                  full.row(static_cast<std::size_t>(sel[i])) + cfg.extract_len, picked.row(i));

    if (cfg.normalization != Normalization::None)
        picked = apply_normalizer(picked, *stats, &sel);

    res.window = std::move(picked);
    return res;
}

}  // namespace wrenchval
