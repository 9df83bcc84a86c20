#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "wrenchval/metrics.hpp"

namespace wrenchval {

// FNV-1a over the canonical (sorted-key) JSON dump; identifies configs in reports.
std::string config_hash(const nlohmann::json& j);

// Everything needed to recompute the reported metrics from persisted
// artifacts. Timing lives in its own block so reports stay byte-comparable
// across reruns of the same seed.
struct RunReport {
    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> config_hashes;
    std::map<int, std::string> class_map;
    std::map<std::string, double> per_class_f1;
    double macro_f1 = 0.0;
    std::vector<std::vector<std::int64_t>> confusion;  // rows = true class
    std::size_t param_count = 0;
    std::map<std::string, std::string> artifacts;
    std::map<std::string, double> timing_s;
    nlohmann::json extra;

    void set_metrics(const ConfusionMatrix& cm, const std::map<int, std::string>& classes);
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;
};

}  // namespace wrenchval
