#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slr/symbolic_kb.hpp"

namespace slr {

struct RecognizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RecognitionResult {
    std::optional<std::string> predicted_label;  // nullopt = rejected
    double best_score = 0.0;
    std::vector<std::pair<int, double>> ranked;  // (template index, score), descending
    int ties = 0;                                // templates sharing the best score

    bool rejected() const { return !predicted_label.has_value(); }
};

// Per-key-frame similarity between an interval row and a crisp vector:
// a feature inside its interval contributes 1, otherwise the reciprocal
// distance to the nearer bound, 1/(1 + |bound - value|); the row score is
// the mean contribution, always in (0, 1].
double frame_similarity(const IntervalRow& rf, const FeatureRow& tf);

// Sum of frame_similarity over the K aligned key frames, in (0, K].
double total_similarity(const SignTemplate& tpl, const KeyframeMatrix& test);

// Scores every template and picks the best label; ties break by label then
// template index and are reported. With a reject threshold set, a best
// score below it yields a rejection instead of a label.
RecognitionResult recognize(const Knowledgebase& kb, const KeyframeMatrix& test,
                            std::optional<double> reject_threshold = std::nullopt);

}  // namespace slr
