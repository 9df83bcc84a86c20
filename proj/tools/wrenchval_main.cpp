// wrenchval: validates robot cockpit interactions from force/torque/pose
// recordings. Subcommands cover the full loop: generate synthetic data,
// preprocess, train, evaluate, classify and explain.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wrenchval/cli.hpp"
#include "wrenchval/errors.hpp"
#include "wrenchval/kernels.hpp"

using namespace wrenchval;

int main(int argc, char** argv) {
    CLI::App app{"wrench-based action validation toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "seed for every random choice in the command")->capture_default_str();

    // generate
    cli::GenerateArgs gen;
    auto* cmd_gen = app.add_subcommand("generate", "synthesize a labeled dataset with ground truth");
    std::string gen_spec, gen_action, gen_out;
    int gen_count = 0;
    double gen_imbalance = 0.0;
    cmd_gen->add_option("--spec", gen_spec, "generator spec JSON");
    cmd_gen->add_option("--action", gen_action, "action kind (button|switch|knob|flap|ldg|sbrake)");
    cmd_gen->add_option("--count", gen_count, "records per class");
    cmd_gen->add_option("--imbalance", gen_imbalance,
                        "knob-style imbalanced set; fraction of records in the mid-state class");
    cmd_gen->add_option("--out", gen_out, "output directory")->required();

    // preprocess
    cli::PreprocessArgs pre;
    auto* cmd_pre = app.add_subcommand("preprocess", "run the signal pipeline over a manifest");
    std::string pre_cfg, pre_manifest, pre_out, pre_stats;
    cmd_pre->add_option("--config", pre_cfg, "pipeline config JSON")->required();
    cmd_pre->add_option("--manifest", pre_manifest, "dataset manifest JSON")->required();
    cmd_pre->add_option("--out", pre_out, "output directory")->required();
    cmd_pre->add_option("--stats", pre_stats, "reuse fitted normalizer stats JSON");
    cmd_pre->add_flag("--emit-scaleograms", pre.emit_scaleograms, "also export CWT scaleograms");

    // train
    cli::TrainArgs tr;
    auto* cmd_train = app.add_subcommand("train", "split, preprocess, train and evaluate a model");
    std::string tr_manifest, tr_out, tr_model_cfg, tr_pipe_cfg, tr_train_cfg, tr_cwt_cfg;
    cmd_train->add_option("--manifest", tr_manifest, "dataset manifest JSON")->required();
    cmd_train->add_option("--out", tr_out, "output directory")->required();
    cmd_train->add_option("--preset", tr.preset,
                          "ffann|cnn1d|cnn2d|hybrid-all|hybrid-unit-measure|hybrid-specific")
        ->capture_default_str();
    cmd_train->add_option("--model-config", tr_model_cfg, "architecture JSON (overrides --preset)");
    cmd_train->add_option("--pipeline", tr_pipe_cfg, "pipeline config JSON");
    cmd_train->add_option("--train-config", tr_train_cfg, "training config JSON");
    cmd_train->add_option("--cwt-config", tr_cwt_cfg, "CWT config JSON");
    cmd_train->add_flag("--final", tr.final_split, "train-test 70-30 instead of 60-20-20");
    cmd_train->add_flag("--balance", tr.balance, "augment minority classes in the training split");

    // eval
    cli::EvalArgs ev;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a trained model on labeled records");
    std::string ev_model, ev_manifest, ev_out;
    cmd_eval->add_option("--model", ev_model, "model file")->required();
    cmd_eval->add_option("--manifest", ev_manifest, "dataset manifest JSON")->required();
    cmd_eval->add_option("--out", ev_out, "output directory")->required();

    // classify
    cli::ClassifyArgs cl;
    auto* cmd_classify = app.add_subcommand("classify", "verdict for a single record");
    std::string cl_model, cl_record, cl_out;
    cmd_classify->add_option("--model", cl_model, "model file")->required();
    cmd_classify->add_option("--record", cl_record, "record CSV")->required();
    cmd_classify->add_option("--out", cl_out, "output directory")->required();
    cmd_classify->add_flag("--explain", cl.explain, "attach Grad-CAM artifacts");

    // explain
    cli::ExplainArgs ex;
    auto* cmd_explain = app.add_subcommand("explain", "Grad-CAM attribution for a record");
    std::string ex_model, ex_record, ex_out;
    int ex_class = -1;
    cmd_explain->add_option("--model", ex_model, "model file")->required();
    cmd_explain->add_option("--record", ex_record, "record CSV")->required();
    cmd_explain->add_option("--class", ex_class, "target class id (default: predicted)");
    cmd_explain->add_option("--out", ex_out, "output directory")->required();

    // let `wrenchval <cmd> --seed N` reach the global option
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors -> 1
    }

    try {
        if (cmd_gen->parsed()) {
            if (!gen_spec.empty()) gen.spec_path = gen_spec;
            if (!gen_action.empty()) gen.action = gen_action;
            if (gen_count > 0) gen.count = gen_count;
            if (cmd_gen->count("--imbalance") > 0) gen.imbalance = gen_imbalance;
            gen.out_dir = gen_out;
            gen.seed = seed;
            gen.seed_given = app.count("--seed") > 0;
            return cli::run_generate(gen);
        }
        if (cmd_pre->parsed()) {
            pre.config_path = pre_cfg;
            pre.manifest_path = pre_manifest;
            pre.out_dir = pre_out;
            if (!pre_stats.empty()) pre.stats_in = pre_stats;
            return cli::run_preprocess(pre);
        }
        if (cmd_train->parsed()) {
            tr.manifest_path = tr_manifest;
            tr.out_dir = tr_out;
            if (!tr_model_cfg.empty()) tr.model_config = tr_model_cfg;
            if (!tr_pipe_cfg.empty()) tr.pipeline_config = tr_pipe_cfg;
            if (!tr_train_cfg.empty()) tr.train_config = tr_train_cfg;
            if (!tr_cwt_cfg.empty()) tr.cwt_config = tr_cwt_cfg;
            tr.seed = seed;
            return cli::run_train(tr);
        }
        if (cmd_eval->parsed()) {
            ev.model_path = ev_model;
            ev.manifest_path = ev_manifest;
            ev.out_dir = ev_out;
            return cli::run_eval(ev);
        }
        if (cmd_classify->parsed()) {
            cl.model_path = cl_model;
            cl.record_path = cl_record;
            cl.out_dir = cl_out;
            return cli::run_classify(cl);
        }
        if (cmd_explain->parsed()) {
            ex.model_path = ex_model;
            ex.record_path = ex_record;
            ex.out_dir = ex_out;
            if (cmd_explain->count("--class") > 0) ex.target_class = ex_class;
            return cli::run_explain(ex);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
