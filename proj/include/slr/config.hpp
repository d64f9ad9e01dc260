#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "slr/segmentation.hpp"
#include "slr/symbolic_kb.hpp"

namespace slr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key = value config file driving every pipeline stage; '#' starts a
// comment. Unknown keys are rejected. serialize_config emits the canonical
// form (fixed key order, shortest round-trip floats).
struct PipelineConfig {
    SkinConfig skin;
    MorphConfig morph;
    double min_area_frac = 0.001;   // of frame pixels
    bool normalize_features = false;  // divide d1..d6 by the frame diagonal

    int k = 40;
    double delta = 0.5;
    int depth = 2;
    std::string linkage = "average";
    std::string threshold_mode = "max";  // max | root
    std::optional<double> reject_threshold;

    int train_pct = 60;
    int test_pct = 40;
    int trials = 5;
    int kfold = 10;

    std::uint64_t seed = 1;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const PipelineConfig& cfg);
void validate_config(const PipelineConfig& cfg);

KbParams kb_params(const PipelineConfig& cfg);

}  // namespace slr
