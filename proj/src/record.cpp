#include "wrenchval/record.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wrenchval/errors.hpp"
#include "wrenchval/random.hpp"

namespace wrenchval {

using nlohmann::json;

ActionKind action_kind_from_string(const std::string& s) {
    std::string t;
    for (char c : s) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "button") return ActionKind::Button;
    if (t == "switch") return ActionKind::Switch;
    if (t == "knob") return ActionKind::Knob;
    if (t == "flap") return ActionKind::Flap;
    if (t == "ldg") return ActionKind::Ldg;
    if (t == "sbrake" || t == "s-brake" || t == "s_brake") return ActionKind::SBrake;
    throw DataError("unknown action kind: '" + s + "'");
}

std::string to_string(ActionKind k) {
    switch (k) {
        case ActionKind::Button: return "button";
        case ActionKind::Switch: return "switch";
        case ActionKind::Knob: return "knob";
        case ActionKind::Flap: return "flap";
        case ActionKind::Ldg: return "ldg";
        case ActionKind::SBrake: return "sbrake";
    }
    return "button";
}

void ActionRecord::validate() const {
    if (id.empty()) throw DataError("record has empty id");
    if (!(sample_rate_hz > 0)) throw DataError("record '" + id + "': sample_rate_hz must be > 0");
    if (channels.rank() != 2 || channels.dim(0) != kNumChannels)
        throw DataError("record '" + id + "': channels must have shape [9, N], got " +
                        shape_string(channels.shape()));
    const std::size_t n = channels.dim(1);
    if (n < 1) throw DataError("record '" + id + "': empty signal");
    if (tcp_rotvec.rank() != 2 || tcp_rotvec.dim(0) != 3 || tcp_rotvec.dim(1) != n)
        throw DataError("record '" + id + "': tcp_rotvec must have shape [3, " + std::to_string(n) +
                        "], got " + shape_string(tcp_rotvec.shape()));
    if (!channels.all_finite() || !tcp_rotvec.all_finite())
        throw DataError("record '" + id + "': non-finite sample value");
    if (label.class_id < 0) throw DataError("record '" + id + "': negative class_id");
    if (label.class_name.empty()) throw DataError("record '" + id + "': empty class_name");
}

void Dataset::validate() const {
    for (const auto& [cid, name] : class_map) {
        if (cid < 0) throw DataError("class_map has negative class_id");
        if (name.empty()) throw DataError("class_map has empty class name");
    }
    {
        // class_id <-> class_name must be bijective
        std::map<std::string, int> seen;
        for (const auto& [cid, name] : class_map) {
            auto [it, inserted] = seen.emplace(name, cid);
            if (!inserted)
                throw DataError("class name '" + name + "' mapped to multiple ids");
        }
    }
    for (const auto& rec : records) {
        rec.validate();
        if (rec.action_kind != action_kind)
            throw DataError("record '" + rec.id + "' has action kind '" + to_string(rec.action_kind) +
                            "', dataset is '" + to_string(action_kind) + "'");
        auto it = class_map.find(rec.label.class_id);
        if (it == class_map.end())
            throw DataError("record '" + rec.id + "' has class_id " +
                            std::to_string(rec.label.class_id) + " missing from class_map");
        if (it->second != rec.label.class_name)
            throw DataError("record '" + rec.id + "' class name '" + rec.label.class_name +
                            "' disagrees with class_map ('" + it->second + "')");
    }
}

std::map<int, std::size_t> Dataset::class_counts() const {
    std::map<int, std::size_t> counts;
    for (const auto& [cid, name] : class_map) counts[cid] = 0;
    for (const auto& rec : records) counts[rec.label.class_id]++;
    return counts;
}

// --- CSV / JSON I/O ----------------------------------------------------------

namespace {

double parse_field(const std::string& field, const std::filesystem::path& path, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError("bad numeric field '" + field + "' at " + path.string() + ":" +
                        std::to_string(line_no));
    if (!std::isfinite(v))
        throw DataError("non-finite sample at " + path.string() + ":" + std::to_string(line_no));
    return v;
}

constexpr const char* kCsvHeader = "t,fx,fy,fz,tx,ty,tz,dpx,dpy,dpz,rx,ry,rz";

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

}  // namespace

ActionRecord load_record_csv(const std::filesystem::path& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw DataError("cannot open record file: " + csv_path.string());

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty record file: " + csv_path.string());
    // tolerate trailing \r from foreign line endings
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw DataError("unexpected CSV header in " + csv_path.string() + ": '" + line + "'");

    std::vector<std::array<double, 13>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 13> row{};
        std::size_t pos = 0;
        for (int f = 0; f < 13; ++f) {
            std::size_t comma = line.find(',', pos);
            std::string field = (comma == std::string::npos) ? line.substr(pos)
                                                             : line.substr(pos, comma - pos);
            if (f < 12 && comma == std::string::npos)
                throw DataError("expected 13 fields at " + csv_path.string() + ":" +
                                std::to_string(line_no));
            row[f] = parse_field(field, csv_path, line_no);
            pos = (comma == std::string::npos) ? line.size() : comma + 1;
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw DataError("record has no samples: " + csv_path.string());

    const std::size_t n = rows.size();
    ActionRecord rec;
    rec.channels = Tensor({static_cast<std::size_t>(kNumChannels), n});
    rec.tcp_rotvec = Tensor({3, n});
    for (std::size_t i = 0; i < n; ++i) {
        for (int c = 0; c < kNumChannels; ++c) rec.channels.at(c, i) = rows[i][1 + c];
        for (int c = 0; c < 3; ++c) rec.tcp_rotvec.at(c, i) = rows[i][10 + c];
    }

    std::ifstream meta_in(sidecar_path(csv_path));
    if (!meta_in) throw DataError("missing sidecar JSON for " + csv_path.string());
    json meta;
    try {
        meta = json::parse(meta_in);
    } catch (const json::exception& e) {
        throw DataError("invalid sidecar JSON for " + csv_path.string() + ": " + e.what());
    }
    try {
        rec.id = meta.at("id").get<std::string>();
        rec.action_kind = action_kind_from_string(meta.at("action_kind").get<std::string>());
        rec.sample_rate_hz = meta.at("sample_rate_hz").get<double>();
        // labels are optional at the record level (classify works on unlabeled
        // records); dataset validation enforces them against the class map
        rec.label.class_id = meta.value("class_id", 0);
        rec.label.class_name = meta.value("class_name", "unlabeled");
        rec.augmented = meta.value("augmented", false);
    } catch (const json::exception& e) {
        throw DataError("sidecar JSON for " + csv_path.string() + " missing fields: " + e.what());
    }
    rec.validate();
    return rec;
}

void save_record_csv(const ActionRecord& rec, const std::filesystem::path& csv_path) {
    rec.validate();
    std::ofstream out(csv_path);
    if (!out) throw DataError("cannot write record file: " + csv_path.string());
    out << kCsvHeader << "\n";
    char buf[32];
    const std::size_t n = rec.length();
    for (std::size_t i = 0; i < n; ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(i) / rec.sample_rate_hz);
        out << buf;
        for (int c = 0; c < kNumChannels; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", rec.channels.at(c, i));
            out << ',' << buf;
        }
        for (int c = 0; c < 3; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", rec.tcp_rotvec.at(c, i));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + csv_path.string());

    json meta = {
        {"id", rec.id},
        {"action_kind", to_string(rec.action_kind)},
        {"sample_rate_hz", rec.sample_rate_hz},
        {"class_id", rec.label.class_id},
        {"class_name", rec.label.class_name},
        {"augmented", rec.augmented},
    };
    std::ofstream meta_out(sidecar_path(csv_path));
    meta_out << meta.dump(2) << "\n";
    if (!meta_out) throw DataError("write failed: " + sidecar_path(csv_path).string());
}

Dataset load_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest: " + manifest_path.string());
    json m;
    try {
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("invalid manifest JSON: " + std::string(e.what()));
    }

    Dataset ds;
    try {
        ds.action_kind = action_kind_from_string(m.at("action_kind").get<std::string>());
        for (auto& [key, val] : m.at("class_map").items())
            ds.class_map[std::stoi(key)] = val.get<std::string>();
        const auto base = manifest_path.parent_path();
        for (const auto& entry : m.at("records")) {
            std::filesystem::path p = entry.get<std::string>();
            if (p.is_relative()) p = base / p;
            ds.records.push_back(load_record_csv(p));
        }
    } catch (const json::exception& e) {
        throw DataError("manifest " + manifest_path.string() + " missing fields: " + e.what());
    }
    ds.validate();
    return ds;
}

std::filesystem::path save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    ds.validate();
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["action_kind"] = to_string(ds.action_kind);
    json cm = json::object();
    for (const auto& [cid, name] : ds.class_map) cm[std::to_string(cid)] = name;
    manifest["class_map"] = cm;
    json paths = json::array();
    for (const auto& rec : ds.records) {
        const std::string fname = rec.id + ".csv";
        save_record_csv(rec, dir / fname);
        paths.push_back(fname);
    }
    manifest["records"] = paths;
    const auto out_path = dir / "manifest.json";
    std::ofstream out(out_path);
    out << manifest.dump(2) << "\n";
    if (!out) throw DataError("write failed: " + out_path.string());
    return out_path;
}

// --- splitting ----------------------------------------------------------------

SplitResult split_dataset(const Dataset& d, SplitFractions fr, std::uint64_t seed) {
    d.validate();
    const double sum = fr.train + fr.val + fr.test;
    if (fr.train < 0 || fr.val < 0 || fr.test < 0 || std::abs(sum - 1.0) > 1e-9)
        throw DataError("split fractions must be nonnegative and sum to 1.0");

    const std::array<double, 3> f = {fr.train, fr.val, fr.test};
    int n_ways = 0;
    for (double v : f) n_ways += v > 0 ? 1 : 0;
    if (n_ways == 0) throw DataError("all split fractions are zero");

    // Originals are stratified; augmented records go straight to train.
    std::map<int, std::vector<std::size_t>> per_class;
    std::vector<std::size_t> augmented_idx;
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        if (d.records[i].augmented)
            augmented_idx.push_back(i);
        else
            per_class[d.records[i].label.class_id].push_back(i);
    }

    for (const auto& [cid, idx] : per_class) {
        if (idx.size() < static_cast<std::size_t>(n_ways))
            throw DataError("class '" + d.class_map.at(cid) + "' has only " +
                            std::to_string(idx.size()) + " records for a " +
                            std::to_string(n_ways) + "-way split");
    }

    SplitResult out;
    for (Dataset* part : {&out.train, &out.val, &out.test}) {
        part->class_map = d.class_map;
        part->action_kind = d.action_kind;
    }

    auto rng = make_rng(seed, 0x517);
    for (auto& [cid, idx] : per_class) {
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n = idx.size();
        // largest-remainder apportionment, then guarantee >=1 per active split
        std::array<std::size_t, 3> take{};
        std::array<double, 3> frac{};
        std::size_t assigned = 0;
        for (int s = 0; s < 3; ++s) {
            const double target = f[s] * static_cast<double>(n);
            take[s] = static_cast<std::size_t>(target);
            frac[s] = target - static_cast<double>(take[s]);
            assigned += take[s];
        }
        std::array<int, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
        for (int s : order) {
            if (assigned == n) break;
            take[s]++;
            assigned++;
        }
        for (int s = 0; s < 3; ++s) {
            while (f[s] > 0 && take[s] == 0) {
                // borrow from the largest bucket
                int big = 0;
                for (int t = 1; t < 3; ++t)
                    if (take[t] > take[big]) big = t;
                take[big]--;
                take[s]++;
            }
        }
        std::size_t pos = 0;
        Dataset* parts[3] = {&out.train, &out.val, &out.test};
        for (int s = 0; s < 3; ++s)
            for (std::size_t k = 0; k < take[s]; ++k) parts[s]->records.push_back(d.records[idx[pos++]]);
    }

    for (std::size_t i : augmented_idx) out.train.records.push_back(d.records[i]);
    return out;
}

}  // namespace wrenchval
