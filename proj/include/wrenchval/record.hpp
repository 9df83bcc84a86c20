#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wrenchval/tensor.hpp"

namespace wrenchval {

enum class ActionKind { Button, Switch, Knob, Flap, Ldg, SBrake };

ActionKind action_kind_from_string(const std::string& s);
std::string to_string(ActionKind k);

inline constexpr int kNumChannels = 9;

// Fixed channel order; file formats and model configs index into this.
inline constexpr std::array<std::string_view, kNumChannels> kChannelNames = {
    "fx", "fy", "fz", "tx", "ty", "tz", "dpx", "dpy", "dpz"};

inline constexpr std::array<int, 3> kForceChannels = {0, 1, 2};
inline constexpr std::array<int, 3> kTorqueChannels = {3, 4, 5};
inline constexpr std::array<int, 3> kDeltaPosChannels = {6, 7, 8};

struct Label {
    int class_id = 0;
    std::string class_name;
};

// One recorded interaction: 9 synchronized channels at sample_rate_hz plus the
// per-sample TCP rotation vector needed for the base->TCP wrench transform.
struct ActionRecord {
    std::string id;
    ActionKind action_kind = ActionKind::Button;
    double sample_rate_hz = 500.0;
    Tensor channels;    // [9, N]: fx,fy,fz [N], tx,ty,tz [N*m], dpx,dpy,dpz [m]
    Tensor tcp_rotvec;  // [3, N] axis-angle [rad]
    Label label;
    bool augmented = false;

    std::size_t length() const { return channels.rank() == 2 ? channels.dim(1) : 0; }
    void validate() const;  // throws DataError on any broken invariant
};

struct Dataset {
    std::vector<ActionRecord> records;
    std::map<int, std::string> class_map;
    ActionKind action_kind = ActionKind::Button;

    std::size_t n_classes() const { return class_map.size(); }
    void validate() const;
    std::map<int, std::size_t> class_counts() const;
};

// --- record / dataset files ---------------------------------------------
// Record: CSV with header t,fx,fy,fz,tx,ty,tz,dpx,dpy,dpz,rx,ry,rz plus a
// sidecar JSON (same path, .json) with id, action_kind, sample_rate_hz, label.
// Manifest: JSON listing record paths and the class map.

ActionRecord load_record_csv(const std::filesystem::path& csv_path);
void save_record_csv(const ActionRecord& rec, const std::filesystem::path& csv_path);

Dataset load_manifest(const std::filesystem::path& manifest_path);
// Writes every record (CSV + sidecar) into dir and a manifest.json referencing them.
std::filesystem::path save_dataset(const Dataset& ds, const std::filesystem::path& dir);

// --- splitting -------------------------------------------------------------

struct SplitFractions {
    double train = 0.6, val = 0.2, test = 0.2;
};

struct SplitResult {
    Dataset train, val, test;
};

// Stratified per class, deterministic in seed, exact partition. Augmented
// records never land in val/test; they are routed to train unconditionally.
SplitResult split_dataset(const Dataset& d, SplitFractions fractions, std::uint64_t seed);

}  // namespace wrenchval
