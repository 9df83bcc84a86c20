#include "wrenchval/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "wrenchval/augment.hpp"
#include "wrenchval/datagen.hpp"
#include "wrenchval/errors.hpp"
#include "wrenchval/explain.hpp"
#include "wrenchval/nn/presets.hpp"
#include "wrenchval/nn/serialize.hpp"
#include "wrenchval/parallel.hpp"
#include "wrenchval/random.hpp"
#include "wrenchval/report.hpp"

namespace wrenchval::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream out(path);
    out << j.dump(2) << "\n";
    if (!out) throw DataError("cannot write: " + path.string());
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// pipeline stage shared by every branch: all channels, no normalization
PipelineConfig stage_config(const PipelineConfig& cfg) {
    PipelineConfig stage = cfg;
    stage.normalization = Normalization::None;
    stage.selected_channels.reset();
    return stage;
}

}  // namespace

std::vector<nn::Sample> build_samples(const Dataset& ds, const nn::ModelSpec& model,
                                      const PipelineConfig& cfg, const NormStats* stats,
                                      const CwtConfig& cwt_cfg,
                                      std::vector<PipelineResult>* pipeline_out) {
    if (model.input_len != cfg.extract_len)
        throw DataError("model expects input_len " + std::to_string(model.input_len) +
                        " but the pipeline extracts " + std::to_string(cfg.extract_len) +
                        " samples; align extract_len with the model");
    if (cfg.normalization != Normalization::None && !stats)
        throw DataError("pipeline normalization is '" + to_string(cfg.normalization) +
                        "' but no fitted stats were provided");
    bool has_2d = false;
    for (const auto& b : model.branches) has_2d |= b.input == nn::InputKind::Scaleograms2d;
    if (has_2d && model.scaleogram_height != cwt_cfg.output_height)
        throw DataError("model scaleogram_height " + std::to_string(model.scaleogram_height) +
                        " does not match cwt output_height " + std::to_string(cwt_cfg.output_height));

    const PipelineConfig stage = stage_config(cfg);
    std::vector<nn::Sample> samples(ds.records.size());
    std::vector<PipelineResult> results(ds.records.size());

    parallel_for(ds.records.size(), [&](std::size_t i) {
        const ActionRecord& rec = ds.records[i];
        PipelineResult base = run_pipeline(rec, stage);
        const Tensor norm_win = (cfg.normalization != Normalization::None)
                                    ? apply_normalizer(base.window, *stats)
                                    : base.window;
        nn::Sample s;
        s.class_id = rec.label.class_id;
        s.record_id = rec.id;
        s.augmented = rec.augmented;
        for (const auto& branch : model.branches) {
            if (branch.input == nn::InputKind::Signals1d) {
                TensorF input({branch.channels.size(), norm_win.dim(1)});
                for (std::size_t r = 0; r < branch.channels.size(); ++r) {
                    const double* src = norm_win.row(static_cast<std::size_t>(branch.channels[r]));
                    float* dst = input.row(r);
                    for (std::size_t k = 0; k < norm_win.dim(1); ++k)
                        dst[k] = static_cast<float>(src[k]);
                }
                s.inputs.push_back(std::move(input));
            } else {
                s.inputs.push_back(scaleogram_stack(base.window, cwt_cfg, branch.channels));
            }
        }
        samples[i] = std::move(s);
        results[i] = std::move(base);
    });

    if (pipeline_out) *pipeline_out = std::move(results);
    return samples;
}

// --- generate -----------------------------------------------------------------

int run_generate(const GenerateArgs& args) {
    GenSpec spec;
    if (args.spec_path) spec = GenSpec::from_json(load_json_file(*args.spec_path));
    if (args.action) spec.action_kind = action_kind_from_string(*args.action);
    if (args.count) spec.count_per_class = *args.count;
    if (args.seed_given) spec.seed = args.seed;
    spec.validate();

    const Generated gen = args.imbalance ? generate_imbalanced(spec, *args.imbalance) : generate(spec);
    fs::create_directories(args.out_dir);
    const fs::path manifest = save_dataset(gen.dataset, args.out_dir);
    save_ground_truth(gen.truth, args.out_dir / "truth.json");
    write_json_file(spec.to_json(), args.out_dir / "genspec.json");

    std::cout << "generated " << gen.dataset.records.size() << " " << to_string(spec.action_kind)
              << " records -> " << manifest.string() << "\n";
    return 0;
}

// --- preprocess ----------------------------------------------------------------

int run_preprocess(const PreprocessArgs& args) {
    const PipelineConfig cfg = PipelineConfig::from_json(load_json_file(args.config_path));
    const Dataset ds = load_manifest(args.manifest_path);
    fs::create_directories(args.out_dir);

    NormStats stats;
    bool have_stats = false;
    if (cfg.normalization != Normalization::None) {
        if (args.stats_in) {
            stats = NormStats::from_json(load_json_file(*args.stats_in));
        } else {
            stats = fit_pipeline_normalizer(ds, cfg);  // standalone mode fits on the given set
        }
        have_stats = true;
        write_json_file(stats.to_json(), args.out_dir / "norm_stats.json");
    }

    const std::vector<int> sel = cfg.channels_or_all();
    const CwtConfig cwt_cfg;

    std::vector<json> index_entries(ds.records.size());
    parallel_for(ds.records.size(), [&](std::size_t i) {
        const ActionRecord& rec = ds.records[i];
        const PipelineResult res = run_pipeline(rec, cfg, have_stats ? &stats : nullptr);

        const fs::path csv_path = args.out_dir / (rec.id + "_window.csv");
        std::ofstream out(csv_path);
        if (!out) throw DataError("cannot write: " + csv_path.string());
        out << "t";
        for (int c : sel) out << ',' << kChannelNames[static_cast<std::size_t>(c)];
        out << "\n";
        char buf[32];
        for (std::size_t k = 0; k < res.window.dim(1); ++k) {
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(k) / rec.sample_rate_hz);
            out << buf;
            for (std::size_t r = 0; r < res.window.dim(0); ++r) {
                std::snprintf(buf, sizeof buf, "%.17g", res.window.at(r, k));
                out << ',' << buf;
            }
            out << '\n';
        }

        if (args.emit_scaleograms) {
            // scaleograms only make sense for force/torque rows
            for (std::size_t r = 0; r < sel.size(); ++r) {
                if (sel[r] > 5) continue;
                Tensor row({res.window.dim(1)},
                           std::vector<double>(res.window.row(r), res.window.row(r) + res.window.dim(1)));
                const Scaleogram s = cwt(row, cwt_cfg, sel[r]);
                const fs::path base =
                    args.out_dir / (rec.id + "_cwt_" + std::string(kChannelNames[static_cast<std::size_t>(sel[r])]));
                save_scaleogram(s, base);
                save_scaleogram_png(s, fs::path(base).replace_extension(".png"));
            }
        }

        json entry;
        entry["id"] = rec.id;
        entry["window_csv"] = csv_path.filename().string();
        entry["start"] = res.start;
        entry["threshold_indices"] = {res.thresholds.hi, res.thresholds.mid, res.thresholds.lo};
        index_entries[i] = std::move(entry);
    });

    json index;
    index["pipeline"] = cfg.to_json();
    index["records"] = index_entries;
    write_json_file(index, args.out_dir / "preprocess_index.json");
    std::cout << "preprocessed " << ds.records.size() << " records -> " << args.out_dir.string() << "\n";
    return 0;
}

// --- train ------------------------------------------------------------------------

int run_train(const TrainArgs& args) {
    const auto t_start = std::chrono::steady_clock::now();

    PipelineConfig pipe_cfg;
    if (args.pipeline_config) pipe_cfg = PipelineConfig::from_json(load_json_file(*args.pipeline_config));
    nn::TrainConfig train_cfg;
    AugmentPolicy policy;
    if (args.train_config) {
        const json j = load_json_file(*args.train_config);
        train_cfg = nn::TrainConfig::from_json(j);
        if (j.contains("augment")) policy = AugmentPolicy::from_json(j.at("augment"));
    }
    CwtConfig cwt_cfg;
    if (args.cwt_config) cwt_cfg = CwtConfig::from_json(load_json_file(*args.cwt_config));
    train_cfg.seed = args.seed;
    policy.seed = args.seed;

    Dataset ds = load_manifest(args.manifest_path);

    const SplitFractions fractions = args.final_split ? SplitFractions{0.7, 0.0, 0.3}
                                                      : SplitFractions{0.6, 0.2, 0.2};
    SplitResult split = split_dataset(ds, fractions, args.seed);

    const auto t_prep = std::chrono::steady_clock::now();
    if (args.balance) split.train = balance_dataset(split.train, policy);

    nn::ModelSpec model_spec;
    if (args.model_config) {
        model_spec = nn::ModelSpec::from_json(load_json_file(*args.model_config));
        if (model_spec.class_map.empty()) model_spec.class_map = ds.class_map;
        if (model_spec.class_map != ds.class_map)
            throw DataError("model config class_map disagrees with the dataset");
    } else {
        model_spec = nn::build_preset(ds.action_kind, nn::preset_from_string(args.preset),
                                      ds.class_map, pipe_cfg.extract_len);
    }

    NormStats stats;
    const bool need_stats = pipe_cfg.normalization != Normalization::None;
    if (need_stats) stats = fit_pipeline_normalizer(split.train, pipe_cfg);

    const std::vector<nn::Sample> train_samples =
        build_samples(split.train, model_spec, pipe_cfg, need_stats ? &stats : nullptr, cwt_cfg);
    const std::vector<nn::Sample> val_samples =
        build_samples(split.val, model_spec, pipe_cfg, need_stats ? &stats : nullptr, cwt_cfg);
    const std::vector<nn::Sample> test_samples =
        build_samples(split.test, model_spec, pipe_cfg, need_stats ? &stats : nullptr, cwt_cfg);
    const double prep_s = seconds_since(t_prep);

    const auto t_train = std::chrono::steady_clock::now();
    nn::Model model = nn::build_model(model_spec, mix_seed(args.seed, 0x90DE1));
    const nn::TrainResult result = nn::train(model, train_samples, val_samples, train_cfg);
    const double train_s = seconds_since(t_train);

    const auto t_eval = std::chrono::steady_clock::now();
    const nn::EvalStats test_stats = nn::evaluate(model, test_samples);
    const double eval_s = seconds_since(t_eval);

    fs::create_directories(args.out_dir);
    const fs::path model_path = args.out_dir / "model.bin";
    nn::save_model(model, model_path);
    write_json_file(pipe_cfg.to_json(), args.out_dir / "pipeline.json");
    write_json_file(cwt_cfg.to_json(), args.out_dir / "cwt.json");
    if (need_stats) write_json_file(stats.to_json(), args.out_dir / "norm_stats.json");
    nn::write_history_csv(result.history, args.out_dir / "history.csv");

    RunReport report;
    report.command = "train";
    report.seed = args.seed;
    report.config_hashes["pipeline"] = config_hash(pipe_cfg.to_json());
    report.config_hashes["model"] = config_hash(model_spec.to_json());
    report.config_hashes["train"] = config_hash(train_cfg.to_json());
    report.config_hashes["cwt"] = config_hash(cwt_cfg.to_json());
    report.set_metrics(test_stats.cm, ds.class_map);
    report.param_count = model.params.count();
    report.artifacts["model"] = model_path.string();
    report.artifacts["history"] = (args.out_dir / "history.csv").string();
    report.timing_s["preprocess"] = prep_s;
    report.timing_s["train"] = train_s;
    report.timing_s["eval"] = eval_s;
    report.timing_s["total"] = seconds_since(t_start);

    json extra;
    extra["preset"] = args.model_config ? "custom" : args.preset;
    extra["split"] = {{"train", split.train.records.size()},
                      {"val", split.val.records.size()},
                      {"test", split.test.records.size()}};
    extra["balanced"] = args.balance;
    extra["best_epoch"] = result.best_epoch;
    extra["epochs_run"] = result.history.size();
    json branches = json::array();
    for (const auto& b : model_spec.branches) {
        json bj;
        bj["input"] = nn::to_string(b.input);
        json names = json::array();
        for (int c : b.channels) names.push_back(std::string(kChannelNames[static_cast<std::size_t>(c)]));
        bj["channels"] = names;
        bj["layers"] = b.layers.size();
        branches.push_back(bj);
    }
    extra["branches"] = branches;
    report.extra = extra;
    report.save(args.out_dir / "report.json");

    std::cout << "test macro-F1 " << report.macro_f1 << " with " << report.param_count
              << " parameters; report -> " << (args.out_dir / "report.json").string() << "\n";
    return 0;
}

// --- eval ---------------------------------------------------------------------------

namespace {

struct Bundle {
    nn::Model model;
    PipelineConfig pipeline;
    CwtConfig cwt;
    NormStats stats;
    bool has_stats = false;
};

Bundle load_bundle(const fs::path& model_path) {
    Bundle b{nn::load_model(model_path), {}, {}, {}, false};
    const fs::path dir = model_path.parent_path();
    if (fs::exists(dir / "pipeline.json"))
        b.pipeline = PipelineConfig::from_json(load_json_file(dir / "pipeline.json"));
    if (fs::exists(dir / "cwt.json")) b.cwt = CwtConfig::from_json(load_json_file(dir / "cwt.json"));
    if (fs::exists(dir / "norm_stats.json")) {
        b.stats = NormStats::from_json(load_json_file(dir / "norm_stats.json"));
        b.has_stats = true;
    }
    if (b.pipeline.normalization != Normalization::None && !b.has_stats)
        throw DataError("model bundle at " + dir.string() +
                        " is missing norm_stats.json required by its pipeline config");
    b.pipeline.extract_len = b.model.spec.input_len;
    return b;
}

}  // namespace

int run_eval(const EvalArgs& args) {
    const auto t0 = std::chrono::steady_clock::now();
    const Bundle bundle = load_bundle(args.model_path);
    const Dataset ds = load_manifest(args.manifest_path);
    if (ds.records.empty()) throw DataError("manifest lists no records");
    if (ds.class_map != bundle.model.spec.class_map)
        throw DataError("dataset class_map does not match the model's class map");

    const std::vector<nn::Sample> samples = build_samples(
        ds, bundle.model.spec, bundle.pipeline, bundle.has_stats ? &bundle.stats : nullptr, bundle.cwt);

    fs::create_directories(args.out_dir);
    ConfusionMatrix cm(ds.class_map.size());
    const fs::path verdicts_path = args.out_dir / "verdicts.csv";
    std::ofstream verdicts(verdicts_path);
    verdicts << "record_id,true_class,predicted_class,correct,p_predicted\n";
    for (const auto& s : samples) {
        const auto [pred, probs] = nn::predict(bundle.model, s.inputs);
        cm.add(s.class_id, pred);
        verdicts << s.record_id << ',' << ds.class_map.at(s.class_id) << ','
                 << ds.class_map.at(pred) << ',' << (pred == s.class_id ? 1 : 0) << ','
                 << probs[static_cast<std::size_t>(pred)] << '\n';
    }
    if (!verdicts) throw DataError("cannot write verdicts: " + verdicts_path.string());

    RunReport report;
    report.command = "eval";
    report.set_metrics(cm, ds.class_map);
    report.param_count = bundle.model.params.count();
    report.config_hashes["pipeline"] = config_hash(bundle.pipeline.to_json());
    report.config_hashes["model"] = config_hash(bundle.model.spec.to_json());
    report.artifacts["verdicts"] = verdicts_path.string();
    report.timing_s["total"] = seconds_since(t0);
    report.save(args.out_dir / "report.json");

    std::cout << "eval macro-F1 " << report.macro_f1 << " over " << samples.size() << " records\n";
    return 0;
}

// --- classify -------------------------------------------------------------------------

int run_classify(const ClassifyArgs& args) {
    const Bundle bundle = load_bundle(args.model_path);
    const ActionRecord rec = load_record_csv(args.record_path);
    fs::create_directories(args.out_dir);
    const fs::path verdict_path = args.out_dir / (rec.id + "_verdict.json");

    json verdict;
    Dataset single;
    single.action_kind = rec.action_kind;
    single.class_map = bundle.model.spec.class_map;
    ActionRecord stripped = rec;
    stripped.label = Label{bundle.model.spec.class_map.begin()->first,
                           bundle.model.spec.class_map.begin()->second};  // label unused for inference
    single.records.push_back(stripped);

    try {
        std::vector<PipelineResult> pipeline_results;
        const std::vector<nn::Sample> samples =
            build_samples(single, bundle.model.spec, bundle.pipeline,
                          bundle.has_stats ? &bundle.stats : nullptr, bundle.cwt, &pipeline_results);
        const auto [pred, probs] = nn::predict(bundle.model, samples[0].inputs);

        verdict["class_id"] = pred;
        verdict["class_name"] = bundle.model.spec.class_map.at(pred);
        json pj = json::object();
        std::size_t i = 0;
        for (const auto& [cid, name] : bundle.model.spec.class_map) pj[name] = probs[i++];
        verdict["probabilities"] = pj;
        verdict["onset_index"] = pipeline_results[0].start;
        verdict["attribution_path"] = nullptr;

        if (args.explain) {
            for (std::size_t b = 0; b < bundle.model.spec.branches.size(); ++b) {
                const auto& branch = bundle.model.spec.branches[b];
                const fs::path base = args.out_dir / (rec.id + "_attribution_b" + std::to_string(b));
                std::vector<std::string> names;
                for (int c : branch.channels)
                    names.emplace_back(kChannelNames[static_cast<std::size_t>(c)]);
                Tensor window({branch.channels.size(), pipeline_results[0].window.dim(1)});
                for (std::size_t r = 0; r < branch.channels.size(); ++r)
                    std::copy(pipeline_results[0].window.row(static_cast<std::size_t>(branch.channels[r])),
                              pipeline_results[0].window.row(static_cast<std::size_t>(branch.channels[r])) +
                                  window.dim(1),
                              window.row(r));
                const Attribution att =
                    branch.input == nn::InputKind::Signals1d
                        ? gradcam_1d(bundle.model, samples[0].inputs, pred, b)
                        : gradcam_2d(bundle.model, samples[0].inputs, pred, b);
                export_attribution(att, window, names, rec.sample_rate_hz, base);
            }
            verdict["attribution_path"] = args.out_dir.string();
        }
    } catch (const NoTransientError&) {
        // untouched panel: report the sentinel rather than a model class
        verdict["class_id"] = nullptr;
        verdict["class_name"] = "NoContact";
        verdict["probabilities"] = json::object();
        verdict["onset_index"] = nullptr;
        verdict["attribution_path"] = nullptr;
    }

    write_json_file(verdict, verdict_path);
    std::cout << verdict.dump(2) << "\n";
    return 0;
}

// --- explain ----------------------------------------------------------------------------

int run_explain(const ExplainArgs& args) {
    const Bundle bundle = load_bundle(args.model_path);
    const ActionRecord rec = load_record_csv(args.record_path);
    fs::create_directories(args.out_dir);

    Dataset single;
    single.action_kind = rec.action_kind;
    single.class_map = bundle.model.spec.class_map;
    ActionRecord stripped = rec;
    stripped.label = Label{bundle.model.spec.class_map.begin()->first,
                           bundle.model.spec.class_map.begin()->second};
    single.records.push_back(stripped);

    std::vector<PipelineResult> pipeline_results;
    const std::vector<nn::Sample> samples =
        build_samples(single, bundle.model.spec, bundle.pipeline,
                      bundle.has_stats ? &bundle.stats : nullptr, bundle.cwt, &pipeline_results);

    int target = 0;
    if (args.target_class) {
        target = *args.target_class;
        if (bundle.model.spec.class_map.find(target) == bundle.model.spec.class_map.end())
            throw DataError("target class " + std::to_string(target) + " not in the model's class map");
    } else {
        target = nn::predict(bundle.model, samples[0].inputs).first;
    }

    for (std::size_t b = 0; b < bundle.model.spec.branches.size(); ++b) {
        const auto& branch = bundle.model.spec.branches[b];
        std::vector<std::string> names;
        for (int c : branch.channels) names.emplace_back(kChannelNames[static_cast<std::size_t>(c)]);
        Tensor window({branch.channels.size(), pipeline_results[0].window.dim(1)});
        for (std::size_t r = 0; r < branch.channels.size(); ++r)
            std::copy(pipeline_results[0].window.row(static_cast<std::size_t>(branch.channels[r])),
                      pipeline_results[0].window.row(static_cast<std::size_t>(branch.channels[r])) +
                          window.dim(1),
                      window.row(r));

        const fs::path base = args.out_dir / (rec.id + "_class" + std::to_string(target) + "_b" +
                                              std::to_string(b));
        if (branch.input == nn::InputKind::Signals1d) {
            const Attribution att = gradcam_1d(bundle.model, samples[0].inputs, target, b);
            export_attribution(att, window, names, rec.sample_rate_hz, base);
        } else {
            const Attribution att = gradcam_2d(bundle.model, samples[0].inputs, target, b);
            export_attribution(att, window, names, rec.sample_rate_hz, base);
            // overlay source scaleograms for context
            for (std::size_t r = 0; r < branch.channels.size(); ++r) {
                Tensor row({window.dim(1)},
                           std::vector<double>(window.row(r), window.row(r) + window.dim(1)));
                const Scaleogram s = cwt(row, bundle.cwt, branch.channels[r]);
                save_scaleogram_png(s, fs::path(base).concat("_cwt_" + names[r] + ".png"));
            }
        }
    }
    std::cout << "attributions for class " << target << " -> " << args.out_dir.string() << "\n";
    return 0;
}

}  // namespace wrenchval::cli
