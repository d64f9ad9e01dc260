#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "slr/cli_commands.hpp"

namespace {

slr::PipelineConfig resolve_config(const std::string& config_path,
                                   const std::optional<std::uint64_t>& seed_override) {
    slr::PipelineConfig cfg;
    if (!config_path.empty()) cfg = slr::load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    slr::validate_config(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sentence-level sign recognition pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global --config/--seed may follow the subcommand

    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    app.add_option("--config", config_path, "pipeline config file (key = value)");
    app.add_option("--seed", seed_override, "override the config seed");

    auto* train = app.add_subcommand("train", "build a knowledgebase from a manifest");
    std::string train_manifest, train_out = "kb.txt";
    train->add_option("--manifest", train_manifest, "dataset manifest")->required();
    train->add_option("--out", train_out, "knowledgebase output file");

    auto* rec = app.add_subcommand("recognize", "classify one instance directory");
    std::string rec_kb, rec_dir, rec_label, rec_report;
    rec->add_option("--kb", rec_kb, "knowledgebase file")->required();
    rec->add_option("--instance-dir", rec_dir, "directory of frame images")->required();
    rec->add_option("--label", rec_label, "true label, for the report");
    rec->add_option("--report,--out", rec_report, "append the report record to this file");

    auto* eval = app.add_subcommand("evaluate", "run an evaluation protocol");
    std::string eval_manifest, eval_protocol, eval_out = "eval-reports";
    eval->add_option("--manifest", eval_manifest, "dataset manifest")->required();
    eval->add_option("--protocol", eval_protocol,
                     "holdout | loo | kfold | signer-independent")
        ->required();
    eval->add_option("--out", eval_out, "report output directory");

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    slr::SynthConfig synth_cfg;
    std::string synth_out = "synth-data";
    synth->add_option("--out", synth_out, "output directory");
    synth->add_option("--classes", synth_cfg.classes, "number of sign classes");
    synth->add_option("--signers", synth_cfg.signers, "number of signers");
    synth->add_option("--instances", synth_cfg.instances, "instances per (class, signer)");
    synth->add_option("--width", synth_cfg.width, "frame width");
    synth->add_option("--height", synth_cfg.height, "frame height");
    synth->add_option("--noise", synth_cfg.noise, "RGB noise amplitude");
    synth->add_option("--signer-jitter", synth_cfg.signer_jitter, "per-signer offset, px");
    synth->add_option("--instance-jitter", synth_cfg.instance_jitter,
                      "per-instance control point noise, px");
    synth->add_option("--separation", synth_cfg.min_class_separation,
                      "min mean inter-class trajectory distance, px");
    synth->add_option("--overlap-fraction", synth_cfg.overlap_fraction,
                      "share of classes with scheduled overlap events");
    synth->add_option("--format", synth_cfg.image_format, "png | ppm");

    auto* dbg = app.add_subcommand("segment-debug", "dump masks and features");
    std::string dbg_dir, dbg_out = "segment-debug";
    dbg->add_option("--instance-dir", dbg_dir, "directory of frame images")->required();
    dbg->add_option("--out", dbg_out, "debug output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            slr::cmd_train(resolve_config(config_path, seed_override), train_manifest,
                           train_out);
        } else if (rec->parsed()) {
            slr::cmd_recognize(resolve_config(config_path, seed_override), rec_kb, rec_dir,
                               rec_label.empty() ? std::nullopt
                                                 : std::optional<std::string>(rec_label),
                               rec_report.empty()
                                   ? std::nullopt
                                   : std::optional<std::filesystem::path>(rec_report));
        } else if (eval->parsed()) {
            slr::cmd_evaluate(resolve_config(config_path, seed_override), eval_manifest,
                              eval_protocol, eval_out);
        } else if (synth->parsed()) {
            if (seed_override) synth_cfg.seed = *seed_override;
            slr::cmd_synth(synth_cfg, synth_out);
        } else if (dbg->parsed()) {
            slr::cmd_segment_debug(resolve_config(config_path, seed_override), dbg_dir,
                                   dbg_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
