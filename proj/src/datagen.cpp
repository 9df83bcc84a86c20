#include "wrenchval/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "wrenchval/errors.hpp"
#include "wrenchval/random.hpp"

namespace wrenchval {

using nlohmann::json;

void GenSpec::validate() const {
    if (!(sample_rate_hz > 0)) throw DataError("sample_rate_hz must be positive");
    if (!(duration_s > 0)) throw DataError("duration_s must be positive");
    if (noise_std < 0 || ripple_amp < 0) throw DataError("noise/ripple amplitudes must be nonnegative");
    if (count_per_class < 1) throw DataError("count_per_class must be >= 1");
    const double onset_lo = transient_onset_s - onset_jitter_s;
    const double onset_hi = transient_onset_s + onset_jitter_s;
    if (onset_lo * sample_rate_hz < 64)
        throw DataError("transient onset too close to the start of the record");
    if ((onset_hi + 1.3) > duration_s)
        throw DataError("transient onset too close to the end of the record (need ~1.3 s of action)");
}

json GenSpec::to_json() const {
    return json{{"action_kind", wrenchval::to_string(action_kind)},
                {"duration_s", duration_s},
                {"sample_rate_hz", sample_rate_hz},
                {"noise_std", noise_std},
                {"ripple_amp", ripple_amp},
                {"ripple_hz", ripple_hz},
                {"transient_onset_s", transient_onset_s},
                {"onset_jitter_s", onset_jitter_s},
                {"seed", seed},
                {"count_per_class", count_per_class}};
}

GenSpec GenSpec::from_json(const json& j) {
    GenSpec s;
    try {
        if (j.contains("action_kind"))
            s.action_kind = action_kind_from_string(j.at("action_kind").get<std::string>());
        s.duration_s = j.value("duration_s", s.duration_s);
        s.sample_rate_hz = j.value("sample_rate_hz", s.sample_rate_hz);
        s.noise_std = j.value("noise_std", s.noise_std);
        s.ripple_amp = j.value("ripple_amp", s.ripple_amp);
        s.ripple_hz = j.value("ripple_hz", s.ripple_hz);
        s.transient_onset_s = j.value("transient_onset_s", s.transient_onset_s);
        s.onset_jitter_s = j.value("onset_jitter_s", s.onset_jitter_s);
        s.seed = j.value("seed", s.seed);
        s.count_per_class = j.value("count_per_class", s.count_per_class);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid generator spec: ") + e.what());
    }
    s.validate();
    return s;
}

std::map<int, std::string> class_map_for(ActionKind kind) {
    switch (kind) {
        case ActionKind::Button: return {{0, "Success"}, {1, "Fail"}};
        case ActionKind::Switch: return {{0, "Success"}, {1, "Fail"}};
        case ActionKind::Knob: return {{0, "Success"}, {1, "MidState"}, {2, "Fail"}};
        case ActionKind::Flap: return {{0, "Success"}, {1, "Locked"}};
        case ActionKind::Ldg: return {{0, "Success"}, {1, "NotFullyDown"}};
        case ActionKind::SBrake: return {{0, "Success"}, {1, "Fail"}};
    }
    return {{0, "Success"}, {1, "Fail"}};
}

namespace {

// trapezoid: rise over ramp_up, hold, fall over ramp_down
void add_trapezoid(double* row, std::size_t n, std::int64_t start, int ramp_up, int hold,
                   int ramp_down, double amp) {
    std::int64_t i = start;
    for (int k = 0; k < ramp_up && i < static_cast<std::int64_t>(n); ++k, ++i)
        if (i >= 0) row[i] += amp * (k + 1) / ramp_up;
    for (int k = 0; k < hold && i < static_cast<std::int64_t>(n); ++k, ++i)
        if (i >= 0) row[i] += amp;
    for (int k = 0; k < ramp_down && i < static_cast<std::int64_t>(n); ++k, ++i)
        if (i >= 0) row[i] += amp * (ramp_down - 1 - k) / ramp_down;
}

void add_triangle(double* row, std::size_t n, std::int64_t center, int half_width, double amp) {
    for (int k = -half_width; k <= half_width; ++k) {
        const std::int64_t i = center + k;
        if (i < 0 || i >= static_cast<std::int64_t>(n)) continue;
        row[i] += amp * (1.0 - std::abs(k) / static_cast<double>(half_width + 1));
    }
}

// amplitude-modulated controller ripple, tapered at both ends
void add_ripple(double* row, std::size_t n, std::int64_t start, std::int64_t stop, double amp,
                double freq_hz, double fs, double phase) {
    const int taper = 25;
    for (std::int64_t i = std::max<std::int64_t>(0, start);
         i < std::min<std::int64_t>(static_cast<std::int64_t>(n), stop); ++i) {
        const double t = static_cast<double>(i) / fs;
        double w = 1.0;
        if (i - start < taper) w = static_cast<double>(i - start) / taper;
        if (stop - i < taper) w = std::min(w, static_cast<double>(stop - i) / taper);
        const double am = 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * 0.7 * t + phase * 0.5);
        row[i] += w * am * amp * std::sin(2.0 * std::numbers::pi * freq_hz * t + phase);
    }
}

struct TemplateResult {
    std::int64_t seg_begin = 0, seg_end = 0;  // relative to onset
};

// Class-independent distractor events, drawn from the same rng stream for
// every class so templates differ only inside the discriminative segment.
struct Confounds {
    int regrip_jitter = 0;   // re-grip dip position offset
    double regrip_depth = 3.0;
    int bumps_jitter = 0;    // late tap-bump pair position offset
    double bumps_amp = 1.2;
};

// Per-kind class templates. Classes of one kind share every channel except
// inside the returned discriminative segment. Amplitude scale `gain` jitters
// whole-record level without moving the class boundary structure.
TemplateResult render_template(ActionKind kind, int class_id, Tensor& ch, std::int64_t n0,
                               const GenSpec& spec, double gain, double torque_jitter,
                               double phase, const Confounds& cf) {
    const std::size_t n = ch.dim(1);
    const double fs = spec.sample_rate_hz;
    double* fx = ch.row(0);
    double* fy = ch.row(1);
    double* fz = ch.row(2);
    double* tx = ch.row(3);
    double* ty = ch.row(4);
    double* tz = ch.row(5);
    double* dpx = ch.row(6);
    double* dpy = ch.row(7);
    double* dpz = ch.row(8);
    (void)ty;
    (void)dpy;

    TemplateResult res;
    switch (kind) {
        case ActionKind::Button: {
            const double F = 8.0 * gain;
            add_trapezoid(fz, n, n0, 30, 470, 40, F);
            add_trapezoid(fx, n, n0, 30, 470, 40, 0.5 * gain);
            add_trapezoid(fy, n, n0, 30, 470, 40, -0.4 * gain);
            add_trapezoid(tx, n, n0, 30, 470, 40, 0.15 * gain);
            add_ripple(fz, n, n0 + 35, n0 + 495, spec.ripple_amp, spec.ripple_hz, fs, phase);
            add_ripple(fx, n, n0 + 35, n0 + 495, 0.25 * spec.ripple_amp, spec.ripple_hz, fs, phase + 1.1);
            add_trapezoid(dpz, n, n0, 100, 330, 70, -0.004);
            if (class_id == 0) {
                // click: sharp force collapse with a mild rebound as the dome
                // gives way
                add_trapezoid(fz, n, n0 + 175, 12, 28, 12, -3.5 * gain);
                add_triangle(fz, n, n0 + 238, 14, 1.0 * gain);
            } else {
                // jammed plunger: tight stutter bumps where the click should be
                add_trapezoid(fz, n, n0 + 168, 8, 16, 8, 2.0 * gain);
                add_trapezoid(fz, n, n0 + 202, 8, 16, 8, 1.7 * gain);
                add_trapezoid(fz, n, n0 + 236, 8, 16, 8, 1.4 * gain);
            }
            res.seg_begin = 140;
            res.seg_end = 300;
            break;
        }
        case ActionKind::Switch: {
            const double F = 6.0 * gain;
            add_trapezoid(fy, n, n0, 20, 460, 40, F);
            add_trapezoid(fz, n, n0, 20, 460, 40, 0.8 * gain);
            add_trapezoid(tz, n, n0, 20, 460, 40, 0.3 * gain);
            add_ripple(fy, n, n0 + 25, n0 + 470, spec.ripple_amp, spec.ripple_hz, fs, phase);
            add_trapezoid(dpx, n, n0 + 40, 120, 260, 60, 0.006);
            if (class_id == 0) {
                // snap-through: force lets go after the toggle flips
                add_trapezoid(fy, n, n0 + 380, 8, 84, 8, -4.2 * gain);
                add_triangle(fy, n, n0 + 392, 8, 0.9 * gain);
            }
            res.seg_begin = 340;
            res.seg_end = 500;
            break;
        }
        case ActionKind::Knob: {
            const double grip = 2.5 * gain;
            add_trapezoid(fz, n, n0, 25, 480, 40, grip);
            add_trapezoid(fx, n, n0, 25, 480, 40, 0.4 * gain);
            add_ripple(fz, n, n0 + 30, n0 + 500, 0.5 * spec.ripple_amp, spec.ripple_hz, fs, phase);
            // torque carries the class: full turn with detent, partial turn, barely moved
            double tau;
            if (class_id == 0)
                tau = 1.0 * torque_jitter;
            else if (class_id == 1)
                tau = 0.60 * torque_jitter;
            else
                tau = 0.38 * torque_jitter;
            add_trapezoid(tz, n, n0 + 60, 80, 280, 60, tau);
            if (class_id == 0) add_trapezoid(tz, n, n0 + 300, 10, 25, 10, -0.30 * torque_jitter);
            add_trapezoid(dpx, n, n0 + 60, 150, 200, 60, 0.003);
            res.seg_begin = 60;
            res.seg_end = 480;
            break;
        }
        case ActionKind::Flap: {
            if (class_id == 0) {
                add_trapezoid(fx, n, n0, 18, 447, 50, 5.0 * gain);
                add_trapezoid(dpx, n, n0 + 30, 380, 60, 60, 0.04);
                add_triangle(fx, n, n0 + 440, 25, 2.0 * gain);  // end stop
            } else {
                // lever locked: force climbs higher, nothing moves
                add_trapezoid(fx, n, n0, 18, 447, 50, 6.5 * gain);
                add_trapezoid(dpx, n, n0 + 30, 380, 60, 60, 0.002);
            }
            add_trapezoid(fz, n, n0, 18, 447, 50, 1.0 * gain);
            add_trapezoid(ty, n, n0, 18, 447, 50, 0.4 * gain);
            add_ripple(fx, n, n0 + 25, n0 + 460, spec.ripple_amp, spec.ripple_hz, fs, phase);
            res.seg_begin = 30;
            res.seg_end = 520;
            break;
        }
        case ActionKind::Ldg: {
            const double F = 5.0 * gain;
            add_trapezoid(fz, n, n0, 15, 475, 50, class_id == 0 ? F : 0.9 * F);
            add_trapezoid(fy, n, n0, 15, 475, 50, 0.7 * gain);
            add_trapezoid(tx, n, n0, 15, 475, 50, 0.35 * gain);
            add_ripple(fz, n, n0 + 20, n0 + 480,
                       class_id == 0 ? spec.ripple_amp : 1.6 * spec.ripple_amp, spec.ripple_hz, fs,
                       phase);
            if (class_id == 0) {
                add_trapezoid(dpz, n, n0 + 20, 360, 80, 50, -0.05);
                add_triangle(fz, n, n0 + 430, 30, 2.0 * gain);  // hits the detent at the end
            } else {
                // sticks against resistance: shallow travel, no end spike
                add_trapezoid(dpz, n, n0 + 20, 360, 80, 50, -0.02);
            }
            res.seg_begin = 300;
            res.seg_end = 550;
            break;
        }
        case ActionKind::SBrake: {
            const double F = 6.0 * gain;
            add_trapezoid(fy, n, n0, 15, 465, 50, class_id == 0 ? F : 0.8 * F);
            add_trapezoid(fx, n, n0, 15, 465, 50, 0.6 * gain);
            add_trapezoid(tz, n, n0, 15, 465, 50, 0.4 * gain);
            add_ripple(fy, n, n0 + 20, n0 + 470, spec.ripple_amp, spec.ripple_hz, fs, phase);
            if (class_id == 0) {
                add_trapezoid(dpy, n, n0 + 30, 340, 80, 50, 0.035);
                add_triangle(fy, n, n0 + 430, 25, 1.6 * gain);
            } else {
                // grip slips after the plateau: force sags, lever creeps back
                add_trapezoid(fy, n, n0 + 320, 20, 110, 30, -2.2 * gain);
                add_trapezoid(dpy, n, n0 + 30, 200, 60, 200, 0.015);
            }
            res.seg_begin = 280;
            res.seg_end = 520;
            break;
        }
    }
    return res;
}

std::pair<ActionRecord, GroundTruth> generate_one(const GenSpec& spec, int class_id,
                                                  const std::string& class_name, int index) {
    auto rng = make_rng(spec.seed, 0xDA7A0000ULL + static_cast<std::uint64_t>(index));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
    const double onset_s = spec.transient_onset_s + uni(rng) * spec.onset_jitter_s;
    const auto n0 = static_cast<std::int64_t>(std::llround(onset_s * spec.sample_rate_hz));

    ActionRecord rec;
    rec.id = to_string(spec.action_kind) + "_" + class_name + "_" + std::to_string(index);
    rec.action_kind = spec.action_kind;
    rec.sample_rate_hz = spec.sample_rate_hz;
    rec.label = Label{class_id, class_name};
    rec.channels = Tensor({static_cast<std::size_t>(kNumChannels), n});
    rec.tcp_rotvec = Tensor({3, n});

    const double gain = 1.0 + 0.08 * uni(rng);
    const double torque_jitter = 1.0 + 0.16 * gauss(rng);
    const double phase = uni(rng) * std::numbers::pi;
    Confounds cf;
    cf.regrip_jitter = static_cast<int>(std::lround(35.0 * uni(rng)));
    cf.regrip_depth = 3.0 + 0.8 * uni(rng);
    cf.bumps_jitter = static_cast<int>(std::lround(30.0 * uni(rng)));
    cf.bumps_amp = 1.85 + 0.45 * uni(rng);
    const TemplateResult tpl = render_template(spec.action_kind, class_id, rec.channels, n0, spec,
                                               gain, torque_jitter, phase, cf);

    // sensor noise: forces ~ noise_std, torques and pose deltas scaled down
    for (int c = 0; c < kNumChannels; ++c) {
        double sigma = spec.noise_std;
        if (c >= 3 && c < 6) sigma *= 0.25;
        if (c >= 6) sigma *= 0.004;
        double* row = rec.channels.row(c);
        for (std::size_t i = 0; i < n; ++i) row[i] += sigma * gauss(rng);
    }

    // tool orientation: nominally pointing down with a slow drift during the action
    const double drift = 0.02 * uni(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const double progress =
            std::clamp((static_cast<double>(i) - static_cast<double>(n0)) / 500.0, 0.0, 1.0);
        rec.tcp_rotvec.at(0, i) = std::numbers::pi + drift * progress;
        rec.tcp_rotvec.at(1, i) = 0.01 * drift * progress;
        rec.tcp_rotvec.at(2, i) = 0.0;
    }

    GroundTruth gt;
    gt.record_id = rec.id;
    gt.onset_sample = n0;
    gt.segment_begin = n0 + tpl.seg_begin;
    gt.segment_end = n0 + tpl.seg_end;
    return {std::move(rec), gt};
}

}  // namespace

Generated generate(const GenSpec& spec) {
    spec.validate();
    Generated out;
    out.dataset.action_kind = spec.action_kind;
    out.dataset.class_map = class_map_for(spec.action_kind);

    int index = 0;
    for (const auto& [cid, name] : out.dataset.class_map) {
        for (int k = 0; k < spec.count_per_class; ++k) {
            auto [rec, gt] = generate_one(spec, cid, name, index++);
            out.dataset.records.push_back(std::move(rec));
            out.truth.push_back(gt);
        }
    }
    out.dataset.validate();
    return out;
}

Generated generate_imbalanced(const GenSpec& spec, double minority_fraction) {
    if (!(minority_fraction > 0.0 && minority_fraction < 0.5))
        throw DataError("minority_fraction must lie in (0, 0.5)");
    GenSpec knob = spec;
    knob.action_kind = ActionKind::Knob;
    knob.validate();

    Generated out;
    out.dataset.action_kind = ActionKind::Knob;
    out.dataset.class_map = class_map_for(ActionKind::Knob);

    const int total = knob.count_per_class * static_cast<int>(out.dataset.class_map.size());
    const int minority = std::max(1, static_cast<int>(std::lround(minority_fraction * total)));
    const int majority = (total - minority) / 2;
    const std::map<int, int> counts = {{0, total - minority - majority}, {1, minority}, {2, majority}};

    int index = 0;
    for (const auto& [cid, name] : out.dataset.class_map) {
        for (int k = 0; k < counts.at(cid); ++k) {
            auto [rec, gt] = generate_one(knob, cid, name, index++);
            out.dataset.records.push_back(std::move(rec));
            out.truth.push_back(gt);
        }
    }
    out.dataset.validate();
    return out;
}

void save_ground_truth(const std::vector<GroundTruth>& truth, const std::filesystem::path& path) {
    json j = json::object();
    for (const auto& gt : truth)
        j[gt.record_id] = {{"onset_sample", gt.onset_sample},
                           {"segment", {gt.segment_begin, gt.segment_end}}};
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw DataError("cannot write ground truth: " + path.string());
}

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open ground truth: " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid ground truth JSON: ") + e.what());
    }
    std::vector<GroundTruth> out;
    for (auto& [key, val] : j.items()) {
        GroundTruth gt;
        gt.record_id = key;
        gt.onset_sample = val.at("onset_sample").get<std::int64_t>();
        gt.segment_begin = val.at("segment")[0].get<std::int64_t>();
        gt.segment_end = val.at("segment")[1].get<std::int64_t>();
        out.push_back(std::move(gt));
    }
    return out;
}

}  // namespace wrenchval
