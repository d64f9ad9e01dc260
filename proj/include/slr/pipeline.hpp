#pragma once

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <vector>

#include "slr/config.hpp"
#include "slr/dataset.hpp"
#include "slr/spatial_features.hpp"
#include "slr/symbolic_kb.hpp"

namespace slr {

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Everything the segmentation + tracking stages produce for one instance,
// before key-frame reduction.
struct InstanceFeatures {
    std::vector<TrackedFrame> tracked;        // one per input frame
    std::vector<FrameFeatures> features;      // resolved frames only
    std::vector<int> feature_frames;          // source frame index per row
    int unresolved = 0;
};

// frames -> HSV -> skin mask -> morphology -> components -> identities ->
// F1 features. Unresolved frames are excluded from the feature stream.
InstanceFeatures extract_features(const std::vector<RgbFrame>& frames,
                                  const PipelineConfig& cfg);

// One text row per frame: index, d1..d6, theta, overlap flag.
void write_feature_dump(const std::filesystem::path& path, const InstanceFeatures& feats);

// Full reduction of one manifest entry to its key-frame matrix. The
// key-frame seed mixes the config seed with the instance identity.
SignInstance process_instance(const InstanceEntry& entry,
                              const std::filesystem::path& root,
                              const PipelineConfig& cfg);

// Processes every manifest entry; failures carry instance provenance.
// `progress` (optional) is called after each instance.
std::vector<SignInstance> process_dataset(
    const DatasetManifest& manifest, const PipelineConfig& cfg,
    const std::function<void(const SignInstance&)>& progress = nullptr);

}  // namespace slr
