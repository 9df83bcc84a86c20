#include "wrenchval/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "wrenchval/errors.hpp"
#include "wrenchval/kernels.hpp"
#include "wrenchval/png.hpp"

namespace wrenchval {

using nlohmann::json;

namespace {
const double kMorletAmp = std::pow(std::numbers::pi, -0.25);
// Envelope truncation: exp(-t^2/2) < 6e-19 beyond |t| = 9.2, far below the
// f64 agreement demanded of the brute-force oracle.
constexpr double kSupportSigmas = 9.2;
}  // namespace

void CwtConfig::validate() const {
    if (n_scales < 2) throw DataError("cwt needs at least 2 scales");
    if (!(scale_min > 0) || !(scale_max > scale_min))
        throw DataError("cwt scales must satisfy 0 < scale_min < scale_max");
    if (output_height < 2) throw DataError("cwt output_height must be >= 2");
    if (!(omega0 > 0)) throw DataError("cwt omega0 must be positive");
}

json CwtConfig::to_json() const {
    return json{{"n_scales", n_scales},         {"scale_min", scale_min},
                {"scale_max", scale_max},       {"omega0", omega0},
                {"output_height", output_height}, {"energy_norm", energy_norm}};
}

CwtConfig CwtConfig::from_json(const json& j) {
    CwtConfig c;
    try {
        c.n_scales = j.value("n_scales", c.n_scales);
        c.scale_min = j.value("scale_min", c.scale_min);
        c.scale_max = j.value("scale_max", c.scale_max);
        c.omega0 = j.value("omega0", c.omega0);
        c.output_height = j.value("output_height", c.output_height);
        c.energy_norm = j.value("energy_norm", c.energy_norm);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid cwt config: ") + e.what());
    }
    c.validate();
    return c;
}

std::complex<double> morlet(double t, double omega0) {
    const double envelope = kMorletAmp * std::exp(-0.5 * t * t);
    return {envelope * std::cos(omega0 * t), envelope * std::sin(omega0 * t)};
}

std::vector<double> geometric_scales(const CwtConfig& cfg) {
    cfg.validate();
    std::vector<double> scales(cfg.n_scales);
    const double ratio = std::log(cfg.scale_max / cfg.scale_min) / (cfg.n_scales - 1);
    for (int j = 0; j < cfg.n_scales; ++j) scales[j] = cfg.scale_min * std::exp(ratio * j);
    return scales;
}

Tensor cwt_magnitude_raw(const Tensor& x, const CwtConfig& cfg) {
    cfg.validate();
    if (x.rank() != 1) throw DataError("cwt expects a 1-D signal");
    const std::size_t n = x.size();
    if (n < 8) throw DataError("cwt needs at least 8 samples");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i];
    mean /= static_cast<double>(n);
    std::vector<double> xc(n);
    for (std::size_t i = 0; i < n; ++i) xc[i] = x[i] - mean;

    const std::vector<double> scales = geometric_scales(cfg);
    Tensor out({static_cast<std::size_t>(cfg.n_scales), n});

    std::vector<double> kr, ki;
    for (int s = 0; s < cfg.n_scales; ++s) {
        const double a = scales[s];
        const auto half = static_cast<std::ptrdiff_t>(
            std::min<double>(std::ceil(kSupportSigmas * a), static_cast<double>(n - 1)));
        const std::size_t table = static_cast<std::size_t>(2 * half + 1);
        kr.resize(table);
        ki.resize(table);
        const double norm = cfg.energy_norm ? 1.0 / std::sqrt(a) : 1.0;
        for (std::ptrdiff_t m = -half; m <= half; ++m) {
            const double t = static_cast<double>(m) / a;
            const double env = norm * kMorletAmp * std::exp(-0.5 * t * t);
            // conjugate of the mother wavelet
            kr[static_cast<std::size_t>(m + half)] = env * std::cos(cfg.omega0 * t);
            ki[static_cast<std::size_t>(m + half)] = -env * std::sin(cfg.omega0 * t);
        }
        double* row = out.row(static_cast<std::size_t>(s));
        for (std::size_t b = 0; b < n; ++b) {
            const std::ptrdiff_t sb = static_cast<std::ptrdiff_t>(b);
            const std::ptrdiff_t n0 = std::max<std::ptrdiff_t>(0, sb - half);
            const std::ptrdiff_t n1 = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n) - 1, sb + half);
            const std::size_t len = static_cast<std::size_t>(n1 - n0 + 1);
            const std::size_t off = static_cast<std::size_t>(n0 - sb + half);
            const double re = kernels::dot(xc.data() + n0, kr.data() + off, len);
            const double im = kernels::dot(xc.data() + n0, ki.data() + off, len);
            row[b] = std::hypot(re, im);
        }
    }
    return out;
}

namespace {

Tensor resample_rows(const Tensor& m, int target_rows) {
    const auto rows = m.dim(0);
    if (static_cast<int>(rows) == target_rows) return m;
    const auto cols = m.dim(1);
    Tensor out({static_cast<std::size_t>(target_rows), cols});
    for (int r = 0; r < target_rows; ++r) {
        const double pos = target_rows == 1
                               ? 0.0
                               : static_cast<double>(r) * static_cast<double>(rows - 1) /
                                     static_cast<double>(target_rows - 1);
        const auto lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, rows - 1);
        const double w = pos - static_cast<double>(lo);
        for (std::size_t c = 0; c < cols; ++c)
            out.at(static_cast<std::size_t>(r), c) = (1.0 - w) * m.at(lo, c) + w * m.at(hi, c);
    }
    return out;
}

bool is_constant(const Tensor& x) {
    double mn = x[0], mx = x[0];
    for (std::size_t i = 1; i < x.size(); ++i) {
        mn = std::min(mn, x[i]);
        mx = std::max(mx, x[i]);
    }
    return mx - mn < 1e-13 * (1.0 + std::max(std::abs(mn), std::abs(mx)));
}

}  // namespace

Scaleogram cwt(const Tensor& x, const CwtConfig& cfg, int source_channel) {
    cfg.validate();
    Scaleogram s;
    s.source_channel = source_channel;
    s.scales = geometric_scales(cfg);

    if (x.rank() != 1) throw DataError("cwt expects a 1-D signal");
    if (is_constant(x)) {
        s.values = Tensor({static_cast<std::size_t>(cfg.output_height), x.size()});
        return s;
    }

    Tensor raw = resample_rows(cwt_magnitude_raw(x, cfg), cfg.output_height);
    double mx = 0.0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        mx = std::max(mx, raw[i]);
        mn = std::min(mn, raw[i]);
    }
    if (mx <= 0.0) {
        s.values = std::move(raw);
        return s;
    }
    const double span = mx - mn;
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = span > 0.0 ? (raw[i] - mn) / span : 1.0;
    s.values = std::move(raw);
    return s;
}

TensorF scaleogram_stack(const Tensor& x, const CwtConfig& cfg, const std::vector<int>& channels) {
    cfg.validate();
    if (x.rank() != 2) throw DataError("scaleogram_stack expects [C, N]");
    if (channels.empty()) throw DataError("scaleogram_stack needs at least one channel");
    const std::size_t C = x.dim(0), n = x.dim(1);
    for (int c : channels)
        if (c < 0 || static_cast<std::size_t>(c) >= C)
            throw DataError("scaleogram channel index out of range");

    TensorF stack({channels.size(), static_cast<std::size_t>(cfg.output_height), n});
    for (std::size_t k = 0; k < channels.size(); ++k) {
        Tensor chan({n}, std::vector<double>(x.row(static_cast<std::size_t>(channels[k])),
                                             x.row(static_cast<std::size_t>(channels[k])) + n));
        const Scaleogram s = cwt(chan, cfg, channels[k]);
        float* dst = stack.row(k);
        for (std::size_t i = 0; i < s.values.size(); ++i) dst[i] = static_cast<float>(s.values[i]);
    }
    return stack;
}

std::filesystem::path save_scaleogram(const Scaleogram& s, const std::filesystem::path& base_path) {
    auto bin_path = base_path;
    bin_path.replace_extension(".bin");
    std::ofstream out(bin_path, std::ios::binary);
    if (!out) throw DataError("cannot write scaleogram: " + bin_path.string());
    std::vector<float> f32(s.values.size());
    for (std::size_t i = 0; i < f32.size(); ++i) f32[i] = static_cast<float>(s.values[i]);
    out.write(reinterpret_cast<const char*>(f32.data()),
              static_cast<std::streamsize>(f32.size() * sizeof(float)));
    if (!out) throw DataError("scaleogram write failed: " + bin_path.string());

    json header;
    header["shape"] = {s.values.dim(0), s.values.dim(1)};
    header["scales"] = s.scales;
    header["channel"] = s.source_channel;
    auto json_path = base_path;
    json_path.replace_extension(".json");
    std::ofstream meta(json_path);
    meta << header.dump(2) << "\n";
    if (!meta) throw DataError("scaleogram header write failed: " + json_path.string());
    return bin_path;
}

Scaleogram load_scaleogram(const std::filesystem::path& bin_path) {
    auto json_path = bin_path;
    json_path.replace_extension(".json");
    std::ifstream meta(json_path);
    if (!meta) throw DataError("missing scaleogram header: " + json_path.string());
    json header;
    try {
        header = json::parse(meta);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid scaleogram header: ") + e.what());
    }

    Scaleogram s;
    std::size_t rows, cols;
    try {
        rows = header.at("shape")[0].get<std::size_t>();
        cols = header.at("shape")[1].get<std::size_t>();
        s.scales = header.at("scales").get<std::vector<double>>();
        s.source_channel = header.at("channel").get<int>();
    } catch (const json::exception& e) {
        throw DataError(std::string("scaleogram header missing fields: ") + e.what());
    }

    std::ifstream in(bin_path, std::ios::binary);
    if (!in) throw DataError("cannot open scaleogram: " + bin_path.string());
    std::vector<float> f32(rows * cols);
    in.read(reinterpret_cast<char*>(f32.data()), static_cast<std::streamsize>(f32.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(f32.size() * sizeof(float)))
        throw DataError("scaleogram file truncated: " + bin_path.string());
    std::vector<double> data(f32.begin(), f32.end());
    s.values = Tensor({rows, cols}, std::move(data));
    return s;
}

void save_scaleogram_png(const Scaleogram& s, const std::filesystem::path& path) {
    const int h = static_cast<int>(s.values.dim(0));
    const int w = static_cast<int>(s.values.dim(1));
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // row 0 = smallest scale drawn at the bottom
            const double v = s.values.at(static_cast<std::size_t>(h - 1 - y), static_cast<std::size_t>(x));
            const auto g = static_cast<std::uint8_t>(std::clamp(v, 0.0, 1.0) * 255.0);
            const std::size_t o = (static_cast<std::size_t>(y) * w + x) * 3;
            rgb[o] = g;
            rgb[o + 1] = static_cast<std::uint8_t>(g * 0.55);
            rgb[o + 2] = static_cast<std::uint8_t>(255 - g);
        }
    }
    write_png_rgb(path, w, h, rgb);
}

}  // namespace wrenchval
