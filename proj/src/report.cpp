#include "wrenchval/report.hpp"

#include <fstream>

#include "wrenchval/errors.hpp"

namespace wrenchval {

using nlohmann::json;

std::string config_hash(const json& j) {
    const std::string dump = j.dump();  // nlohmann objects iterate sorted by key
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void RunReport::set_metrics(const ConfusionMatrix& cm, const std::map<int, std::string>& classes) {
    class_map = classes;
    const F1Result f1 = f1_scores(cm);
    macro_f1 = f1.macro;
    per_class_f1.clear();
    std::size_t i = 0;
    for (const auto& [cid, name] : classes) per_class_f1[name] = f1.per_class[i++];
    confusion.assign(cm.num_classes(), std::vector<std::int64_t>(cm.num_classes(), 0));
    for (std::size_t r = 0; r < cm.num_classes(); ++r)
        for (std::size_t c = 0; c < cm.num_classes(); ++c) confusion[r][c] = cm.at(r, c);
}

json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["seed"] = seed;
    j["config_hashes"] = config_hashes;
    json cm = json::object();
    for (const auto& [cid, name] : class_map) cm[std::to_string(cid)] = name;
    j["class_map"] = cm;
    j["per_class_f1"] = per_class_f1;
    j["macro_f1"] = macro_f1;
    j["confusion"] = confusion;
    j["param_count"] = param_count;
    j["artifacts"] = artifacts;
    j["timing"] = timing_s;
    if (!extra.is_null()) j["extra"] = extra;
    return j;
}

void RunReport::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    out << to_json().dump(2) << "\n";
    if (!out) throw DataError("cannot write report: " + path.string());
}

}  // namespace wrenchval
