#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "slr/config.hpp"
#include "slr/synth.hpp"

namespace slr {

// Batch command implementations behind the CLI; each prints a short summary
// to stdout and throws on error (the CLI maps that to a nonzero exit).

// Builds a knowledgebase from a manifest and writes it to kb_out.
// Prints per-class cluster counts and the total representative count.
void cmd_train(const PipelineConfig& cfg, const std::filesystem::path& manifest_path,
               const std::filesystem::path& kb_out);

// Recognizes a single instance (a directory of frame images) against a
// knowledgebase; appends one report record per call when report_out is set.
void cmd_recognize(const PipelineConfig& cfg, const std::filesystem::path& kb_path,
                   const std::filesystem::path& instance_dir,
                   const std::optional<std::string>& true_label,
                   const std::optional<std::filesystem::path>& report_out);

// Runs one evaluation protocol (holdout | loo | kfold | signer-independent)
// and writes trial reports plus confusion matrices under out_dir.
void cmd_evaluate(const PipelineConfig& cfg, const std::filesystem::path& manifest_path,
                  const std::string& protocol, const std::filesystem::path& out_dir);

// Generates a synthetic dataset under out_dir.
void cmd_synth(const SynthConfig& synth_cfg, const std::filesystem::path& out_dir);

// Segments one instance directory and writes per-frame masks (1-bit PNG),
// a blob summary, and the feature dump under out_dir.
void cmd_segment_debug(const PipelineConfig& cfg, const std::filesystem::path& instance_dir,
                       const std::filesystem::path& out_dir);

// Frame files of an instance directory (PNG/PPM), lexicographic order.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

}  // namespace slr
