#include "slr/recognizer.hpp"

#include <algorithm>
#include <cmath>

namespace slr {

double frame_similarity(const IntervalRow& rf, const FeatureRow& tf) {
    double sum = 0.0;
    for (std::size_t d = 0; d < kFeatureCount; ++d) {
        const Interval& iv = rf[d];
        if (iv.lo > iv.hi) throw RecognizerError("frame_similarity: inverted interval");
        const double v = tf[d];
        if (iv.contains(v)) {
            sum += 1.0;
        } else {
            sum += std::max(1.0 / (1.0 + std::abs(iv.lo - v)),
                            1.0 / (1.0 + std::abs(iv.hi - v)));
        }
    }
    return sum / static_cast<double>(kFeatureCount);
}

double total_similarity(const SignTemplate& tpl, const KeyframeMatrix& test) {
    if (tpl.intervals.size() != test.k())
        throw RecognizerError("total_similarity: key-frame count mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < test.k(); ++j)
        total += frame_similarity(tpl.intervals[j], test.rows[j]);
    return total;
}

RecognitionResult recognize(const Knowledgebase& kb, const KeyframeMatrix& test,
                            std::optional<double> reject_threshold) {
    if (kb.templates.empty()) throw RecognizerError("recognize: empty knowledgebase");
    if (static_cast<int>(test.k()) != kb.params.k)
        throw RecognizerError("recognize: test has " + std::to_string(test.k()) +
                              " key frames, knowledgebase expects " +
                              std::to_string(kb.params.k));

    RecognitionResult result;
    result.ranked.reserve(kb.templates.size());
    for (std::size_t i = 0; i < kb.templates.size(); ++i)
        result.ranked.emplace_back(static_cast<int>(i), total_similarity(kb.templates[i], test));

    std::sort(result.ranked.begin(), result.ranked.end(),
              [&](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  const auto& la = kb.templates[a.first].label;
                  const auto& lb = kb.templates[b.first].label;
                  if (la != lb) return la < lb;
                  return a.first < b.first;
              });

    result.best_score = result.ranked.front().second;
    result.ties = static_cast<int>(std::count_if(
        result.ranked.begin(), result.ranked.end(),
        [&](const auto& r) { return r.second == result.best_score; }));
    if (!reject_threshold || result.best_score >= *reject_threshold)
        result.predicted_label = kb.templates[result.ranked.front().first].label;
    return result;
}

}  // namespace slr
