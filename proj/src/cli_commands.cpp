#include "slr/cli_commands.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "slr/evaluation.hpp"
#include "slr/image_io.hpp"
#include "slr/pipeline.hpp"
#include "slr/recognizer.hpp"
#include "slr/rng.hpp"

namespace slr {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::vector<SignInstance> load_and_process(const PipelineConfig& cfg,
                                           const std::filesystem::path& manifest_path) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    if (manifest.entries.empty())
        throw PipelineError("manifest has no entries: " + manifest_path.string());
    std::size_t done = 0;
    return process_dataset(manifest, cfg, [&](const SignInstance&) {
        ++done;
        if (done % 100 == 0)
            std::cout << "processed " << done << "/" << manifest.entries.size()
                      << " instances\n";
    });
}

void write_trial_files(const std::vector<TrialReport>& reports,
                       const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::ofstream trials(out_dir / "trials.txt", std::ios::binary);
    if (!trials) throw EvaluationError("cannot write trial report");
    trials << "# protocol fold ratio seed references tests macro_f\n";
    for (const auto& r : reports) {
        trials << r.protocol << " " << r.fold << " " << (r.ratio.empty() ? "-" : r.ratio)
               << " " << r.seed << " " << r.reference_count << " " << r.test_count << " "
               << fmt_double(r.f.macro);
        if (!r.excluded_classes.empty()) {
            trials << " excluded=";
            for (std::size_t i = 0; i < r.excluded_classes.size(); ++i)
                trials << (i ? "," : "") << r.excluded_classes[i];
        }
        trials << "\n";
    }
    const TrialSummary s = summarize(reports);
    trials << "summary mean " << fmt_double(s.mean) << " std " << fmt_double(s.stddev)
           << "\n";

    for (const auto& r : reports) {
        const std::string stem = "cm_" + r.protocol + "_" + r.fold;
        std::ofstream txt(out_dir / (stem + ".txt"), std::ios::binary);
        txt << "# " << r.protocol << " fold " << r.fold << " macro_f "
            << fmt_double(r.f.macro) << "\n";
        for (std::size_t i = 0; i < r.cm.labels.size(); ++i)
            txt << "# f " << r.cm.labels[i] << " " << fmt_double(r.f.per_class[i]) << "\n";
        txt << cm_to_text(r.cm);
        std::ofstream csv(out_dir / (stem + ".csv"), std::ios::binary);
        csv << cm_to_csv(r.cm);
    }
}

}  // namespace

std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir))
        throw PipelineError("not a directory: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".ppm") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw PipelineError("no frame images in " + dir.string());
    return files;
}

void cmd_train(const PipelineConfig& cfg, const std::filesystem::path& manifest_path,
               const std::filesystem::path& kb_out) {
    const auto instances = load_and_process(cfg, manifest_path);
    const Knowledgebase kb = build_knowledgebase(instances, kb_params(cfg));

    std::map<std::string, int> per_class;
    for (const auto& tpl : kb.templates) ++per_class[tpl.label];
    std::cout << "class clusters\n";
    for (const auto& [label, count] : per_class)
        std::cout << label << " " << count << "\n";
    std::cout << "representatives " << kb.templates.size() << " (from "
              << instances.size() << " training instances)\n";

    save_kb_file(kb_out, kb);
    std::cout << "knowledgebase written to " << kb_out.string() << "\n";
}

void cmd_recognize(const PipelineConfig& cfg, const std::filesystem::path& kb_path,
                   const std::filesystem::path& instance_dir,
                   const std::optional<std::string>& true_label,
                   const std::optional<std::filesystem::path>& report_out) {
    const Knowledgebase kb = load_kb_file(kb_path);
    if (kb.params.k != cfg.k)
        throw PipelineError("config k=" + std::to_string(cfg.k) +
                            " does not match knowledgebase k=" +
                            std::to_string(kb.params.k));

    const auto files = list_frame_files(instance_dir);
    std::vector<RgbFrame> frames;
    frames.reserve(files.size());
    for (const auto& f : files) frames.push_back(read_image(f));

    const InstanceFeatures feats = extract_features(frames, cfg);
    if (feats.features.empty()) throw PipelineError("no resolvable frames");
    const KeyframeMatrix test =
        select_keyframes(feats.features, cfg.k, rng::mix(cfg.seed, "keyframes"));

    const RecognitionResult result = recognize(kb, test, cfg.reject_threshold);

    std::ostringstream record;
    record << "true=" << (true_label ? *true_label : "?") << " predicted="
           << (result.predicted_label ? *result.predicted_label : "Rejected")
           << " score=" << fmt_double(result.best_score) << " ties=" << result.ties
           << " top5=";
    for (std::size_t i = 0; i < result.ranked.size() && i < 5; ++i) {
        const auto& [tpl_idx, score] = result.ranked[i];
        record << (i ? ";" : "") << kb.templates[tpl_idx].label << ":" << fmt_double(score);
    }
    std::cout << record.str() << "\n";

    if (report_out) {
        std::ofstream out(*report_out, std::ios::binary | std::ios::app);
        if (!out) throw PipelineError("cannot write report: " + report_out->string());
        out << record.str() << "\n";
    }
}

void cmd_evaluate(const PipelineConfig& cfg, const std::filesystem::path& manifest_path,
                  const std::string& protocol, const std::filesystem::path& out_dir) {
    const auto data = load_and_process(cfg, manifest_path);

    std::vector<TrialReport> reports;
    if (protocol == "holdout") {
        reports = run_holdout(data, kb_params(cfg), {cfg.train_pct, cfg.test_pct},
                              cfg.trials, cfg.seed, cfg.reject_threshold);
    } else if (protocol == "loo") {
        reports = run_loo(data, cfg.trials, cfg.seed, cfg.reject_threshold);
    } else if (protocol == "kfold") {
        reports = run_kfold(data, cfg.kfold, cfg.seed, cfg.reject_threshold);
    } else if (protocol == "signer-independent") {
        reports = run_signer_independent(data, kb_params(cfg), cfg.reject_threshold);
    } else {
        throw EvaluationError("unknown protocol: " + protocol +
                              " (want holdout | loo | kfold | signer-independent)");
    }

    write_trial_files(reports, out_dir);
    const TrialSummary s = summarize(reports);
    for (const auto& r : reports)
        std::cout << r.protocol << " fold " << r.fold << ": macro F "
                  << fmt_double(r.f.macro) << " (" << r.reference_count << " refs, "
                  << r.test_count << " tests)\n";
    std::cout << "macro F mean " << fmt_double(s.mean) << " std " << fmt_double(s.stddev)
              << "\n";
    std::cout << "reports written to " << out_dir.string() << "\n";
}

void cmd_synth(const SynthConfig& synth_cfg, const std::filesystem::path& out_dir) {
    const auto specs = make_class_specs(synth_cfg);
    const SynthResult result = generate_dataset(specs, synth_cfg, out_dir);
    std::cout << "generated " << result.manifest.entries.size() << " instances ("
              << synth_cfg.classes << " classes x " << synth_cfg.signers << " signers x "
              << synth_cfg.instances << " instances) under " << out_dir.string() << "\n";
    std::cout << "manifest: " << (out_dir / "manifest.txt").string() << "\n";
}

void cmd_segment_debug(const PipelineConfig& cfg, const std::filesystem::path& instance_dir,
                       const std::filesystem::path& out_dir) {
    const auto files = list_frame_files(instance_dir);
    std::filesystem::create_directories(out_dir);

    std::vector<RgbFrame> frames;
    for (const auto& f : files) frames.push_back(read_image(f));
    const long min_area =
        std::lround(cfg.min_area_frac * frames.front().width * frames.front().height);

    std::ofstream blobs_out(out_dir / "blobs.txt", std::ios::binary);
    blobs_out << "# frame blob pixel_count cx cy xmin ymin xmax ymax\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
        BinaryMask mask = morph_cleanup(skin_mask(rgb_to_hsv(frames[i]), cfg.skin), cfg.morph);
        std::ostringstream name;
        name << "mask_" << (i < 10 ? "000" : i < 100 ? "00" : i < 1000 ? "0" : "") << i
             << ".png";
        write_mask_png(out_dir / name.str(), mask);
        const auto blobs = extract_components(mask, min_area);
        for (std::size_t b = 0; b < blobs.size(); ++b)
            blobs_out << i << " " << b << " " << blobs[b].pixel_count << " "
                      << fmt_double(blobs[b].centroid.x) << " "
                      << fmt_double(blobs[b].centroid.y) << " " << blobs[b].xmin << " "
                      << blobs[b].ymin << " " << blobs[b].xmax << " " << blobs[b].ymax
                      << "\n";
    }

    const InstanceFeatures feats = extract_features(frames, cfg);
    write_feature_dump(out_dir / "features.txt", feats);
    std::cout << frames.size() << " frames segmented; " << feats.unresolved
              << " unresolved; debug output under " << out_dir.string() << "\n";
}

}  // namespace slr
