#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "slr/spatial_features.hpp"

namespace slr {

struct KeyframeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

using FeatureRow = std::array<double, kFeatureCount>;

// Exactly K feature rows in ascending order of their source frame indices.
// When the input was shorter than K, rows are cyclic duplicates and
// source_indices carries repeats.
struct KeyframeMatrix {
    std::vector<FeatureRow> rows;
    std::vector<int> source_indices;

    std::size_t k() const { return rows.size(); }

    friend bool operator==(const KeyframeMatrix&, const KeyframeMatrix&) = default;
};

// Clustering internals, exposed so tests can check the medoid property.
struct KeyframeSelection {
    KeyframeMatrix matrix;
    bool clustered = false;            // false when the padding path ran
    std::vector<int> assignment;       // input frame -> cluster id
    std::vector<int> medoids;          // cluster id -> input frame index
};

// Reduces a frame sequence to K key frames: seeded K-means over the
// 7-vectors (at most 100 iterations), then per cluster the medoid, the
// frame minimizing the summed Euclidean distance to all cluster members
// (ties: smallest frame index). Medoids are emitted in temporal order.
// Sequences shorter than K are padded by cyclic repetition instead.
KeyframeSelection select_keyframes_detailed(const std::vector<FrameFeatures>& features,
                                            int k, std::uint64_t seed);

KeyframeMatrix select_keyframes(const std::vector<FrameFeatures>& features, int k,
                                std::uint64_t seed);

double row_distance(const FeatureRow& a, const FeatureRow& b);

}  // namespace slr
