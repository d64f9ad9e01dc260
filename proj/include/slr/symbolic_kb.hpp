#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/keyframes.hpp"

namespace slr {

struct KbError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One performance of one sign, reduced to its key-frame matrix.
struct SignInstance {
    std::string label;
    std::string signer;
    int instance = 0;
    KeyframeMatrix keyframes;

    std::string id() const {
        return label + "/" + signer + "/" + std::to_string(instance);
    }

    friend bool operator==(const SignInstance&, const SignInstance&) = default;
};

struct DendrogramLink {
    int left = 0;   // child node ids; leaves are 0..n-1, link i is n+i
    int right = 0;
    double height = 0.0;
    int size = 0;   // leaves under this link
};

struct Dendrogram {
    int leaf_count = 0;
    std::vector<DendrogramLink> links;  // n-1 links, non-decreasing heights
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v) const { return lo <= v && v <= hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

using IntervalRow = std::array<Interval, kFeatureCount>;

// Interval-valued reference matrix for one cluster of one sign class.
struct SignTemplate {
    std::string label;
    int cluster_id = 0;
    int member_count = 0;
    std::vector<std::string> members;  // provenance: instance ids
    std::vector<IntervalRow> intervals;

    friend bool operator==(const SignTemplate&, const SignTemplate&) = default;
};

enum class ThresholdMode { GlobalMax, RootLink };

struct KbParams {
    int k = 40;
    double delta = 0.5;
    int depth = 2;
    std::string linkage_name = "average";
    ThresholdMode threshold_mode = ThresholdMode::GlobalMax;
    std::string similarity = "interval-reciprocal-v1";

    friend bool operator==(const KbParams&, const KbParams&) = default;
};

struct ClassThreshold {
    std::string label;
    double th = 0.0;

    friend bool operator==(const ClassThreshold&, const ClassThreshold&) = default;
};

struct Knowledgebase {
    KbParams params;
    std::vector<ClassThreshold> class_thresholds;
    std::vector<SignTemplate> templates;

    friend bool operator==(const Knowledgebase&, const Knowledgebase&) = default;
};

inline constexpr int kKbFormatVersion = 1;

// Mean over key frames of the per-row Euclidean distance.
double instance_distance(const KeyframeMatrix& a, const KeyframeMatrix& b);

// Average-linkage agglomerative clustering over instance_distance.
// Deterministic: ties on merge distance go to the smallest node-id pair.
Dendrogram linkage(const std::vector<const KeyframeMatrix*>& instances);
Dendrogram linkage(const std::vector<KeyframeMatrix>& instances);

// Per-link inconsistency coefficient at the given depth: the link's height
// standardized against the heights of links reachable at most `depth`
// levels below it (the link itself is level 1). Uses the sample standard
// deviation; links whose height set is a singleton or has zero spread get
// coefficient 0.
std::vector<double> inconsistency(const Dendrogram& d, int depth = 2);

// Th = reference coefficient - delta * gamma, where gamma is the population
// standard deviation of the non-zero coefficients (0 when fewer than two)
// and the reference is the global maximum, or the root link's coefficient
// in RootLink mode.
double cut_threshold(const std::vector<double>& coeffs, double delta,
                     ThresholdMode mode = ThresholdMode::GlobalMax);

// Maximal subtrees whose links all have coefficients <= th; returns leaf-id
// clusters forming a partition of 0..n-1.
std::vector<std::vector<int>> cut(const Dendrogram& d, const std::vector<double>& coeffs,
                                  double th);
std::vector<std::vector<int>> cut(const Dendrogram& d, double th, int depth = 2);

// Cellwise [min, max] envelope over the member matrices.
std::vector<IntervalRow> aggregate_intervals(
    const std::vector<const KeyframeMatrix*>& members);

// Clusters one class's instances: linkage, inconsistency, adaptive
// threshold, cut. Returns the member-index clusters plus the threshold
// used. A single instance short-circuits to one singleton cluster.
struct ClassClustering {
    std::vector<std::vector<int>> clusters;
    double th = 0.0;
};
ClassClustering cluster_class(const std::vector<const KeyframeMatrix*>& instances,
                              const KbParams& params);

// Full knowledgebase construction: per class, cluster all training
// instances and aggregate each cluster into an interval template.
Knowledgebase build_knowledgebase(const std::vector<SignInstance>& training,
                                  const KbParams& params);

// Versioned, checksummed text serialization; floats round-trip bit-exact.
std::string save_kb(const Knowledgebase& kb);
Knowledgebase load_kb(const std::string& bytes);
void save_kb_file(const std::filesystem::path& path, const Knowledgebase& kb);
Knowledgebase load_kb_file(const std::filesystem::path& path);

}  // namespace slr
