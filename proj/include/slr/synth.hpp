#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/dataset.hpp"
#include "slr/geometry.hpp"

namespace slr {

struct SynthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One synthetic sign class: a static face ellipse plus two hands following
// closed spline trajectories. Scheduled visits pull the manual hand through
// the face or the non-manual hand mid-sequence to provoke overlap events.
struct SynthClassSpec {
    std::string label;
    std::vector<Point> manual_ctrl;     // closed Catmull-Rom control points
    std::vector<Point> nonmanual_ctrl;
    double face_visit_time = -1.0;      // normalized time, < 0 = none
    double hands_visit_time = -1.0;
};

struct SynthConfig {
    int width = 160;
    int height = 120;
    int classes = 10;
    int signers = 4;
    int instances = 10;
    int duration_min = 38;
    int duration_max = 46;
    double signer_jitter = 2.0;        // px, per-signer trajectory offset
    double instance_jitter = 1.0;      // px, per-instance control point noise
    double noise = 0.0;                // per-channel RGB noise amplitude
    double min_class_separation = 12.0;  // px, min mean trajectory distance
    double overlap_fraction = 0.5;     // share of classes given scheduled overlaps
    std::uint64_t seed = 1;
    std::string image_format = "png";  // png | ppm
};

struct GroundTruthFrame {
    Point c1, c2, c3;  // rasterized centroids: face, manual, non-manual
    bool face_overlap = false;
    bool hands_overlap = false;
};

struct GroundTruthInstance {
    std::string label;
    std::string signer;
    int instance = 0;
    std::vector<GroundTruthFrame> frames;
};

struct SynthResult {
    DatasetManifest manifest;
    std::vector<GroundTruthInstance> ground_truth;
};

// Deterministic per-class trajectory layout. Throws when the layout cannot
// meet min_class_separation for the requested class count.
std::vector<SynthClassSpec> make_class_specs(const SynthConfig& cfg);

// Renders every (class, signer, instance) combination to out_dir, writes
// the manifest plus one ground-truth sidecar per instance, and returns
// both. Same seed, same bytes.
SynthResult generate_dataset(const std::vector<SynthClassSpec>& specs,
                             const SynthConfig& cfg,
                             const std::filesystem::path& out_dir);

// Ground-truth sidecar I/O (one text row per frame).
void write_ground_truth(const std::filesystem::path& path, const GroundTruthInstance& gt);
GroundTruthInstance read_ground_truth(const std::filesystem::path& path);

}  // namespace slr
