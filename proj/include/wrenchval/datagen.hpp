#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "wrenchval/record.hpp"

namespace wrenchval {

// Parametric synthetic recordings with ground-truth transient location and
// class-discriminative segment. Signal shapes are qualitative stand-ins for a
// force-controlled cockpit interaction (contact ramp, controller ripple,
// clicks, end-stop spikes); no physical fidelity is claimed. The ground-truth
// sidecar exists to serve as an oracle for detector and attribution tests.
struct GenSpec {
    ActionKind action_kind = ActionKind::Button;
    double duration_s = 4.0;
    double sample_rate_hz = 500.0;
    double noise_std = 0.05;          // force-channel noise [N]
    double ripple_amp = 0.6;          // controller ripple on contact plateaus [N]
    double ripple_hz = 6.0;
    double transient_onset_s = 1.5;
    double onset_jitter_s = 0.4;
    std::uint64_t seed = 0;
    int count_per_class = 100;

    void validate() const;
    nlohmann::json to_json() const;
    static GenSpec from_json(const nlohmann::json& j);
};

struct GroundTruth {
    std::string record_id;
    std::int64_t onset_sample = 0;
    std::int64_t segment_begin = 0;  // class-discriminative interval, absolute samples
    std::int64_t segment_end = 0;
};

struct Generated {
    Dataset dataset;
    std::vector<GroundTruth> truth;
};

std::map<int, std::string> class_map_for(ActionKind kind);

// Deterministic per seed; count_per_class records per class.
Generated generate(const GenSpec& spec);

// Knob-style 3-class set with the mid-state class undersampled to
// minority_fraction of the total (the others split the remainder evenly).
Generated generate_imbalanced(const GenSpec& spec, double minority_fraction);

// Ground-truth sidecar JSON (record id -> onset, segment).
void save_ground_truth(const std::vector<GroundTruth>& truth, const std::filesystem::path& path);
std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path);

}  // namespace wrenchval
