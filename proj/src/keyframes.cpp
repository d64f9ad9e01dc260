#include "slr/keyframes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "slr/rng.hpp"

namespace slr {

double row_distance(const FeatureRow& a, const FeatureRow& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

namespace {

double sq_distance(const FeatureRow& a, const FeatureRow& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Moves points into empty clusters: donor is the largest cluster with at
// least two members (ties: smallest cluster id), the moved point is the
// donor member farthest from the donor centroid (ties: smallest frame id).
void repair_empty_clusters(const std::vector<FeatureRow>& rows, std::vector<int>& assign,
                           std::vector<FeatureRow>& centroids, std::vector<int>& sizes) {
    const int k = static_cast<int>(centroids.size());
    for (int empty = 0; empty < k; ++empty) {
        if (sizes[empty] > 0) continue;
        int donor = -1;
        for (int c = 0; c < k; ++c)
            if (sizes[c] >= 2 && (donor < 0 || sizes[c] > sizes[donor])) donor = c;
        int moved = -1;
        double worst = -1.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (assign[i] != donor) continue;
            const double d = sq_distance(rows[i], centroids[donor]);
            if (d > worst) {
                worst = d;
                moved = static_cast<int>(i);
            }
        }
        assign[moved] = empty;
        --sizes[donor];
        ++sizes[empty];
    }
}

}  // namespace

KeyframeSelection select_keyframes_detailed(const std::vector<FrameFeatures>& features,
                                            int k, std::uint64_t seed) {
    if (features.empty()) throw KeyframeError("empty feature sequence");
    if (k < 1) throw KeyframeError("K must be >= 1");

    const int n = static_cast<int>(features.size());
    std::vector<FeatureRow> rows(n);
    for (int i = 0; i < n; ++i) rows[i] = features[i].as_array();

    KeyframeSelection sel;

    if (n < k) {
        // Cyclic duplication, ordered by (source index, copy number).
        for (int src = 0; src < n; ++src) {
            const int copies = k / n + (src < k % n ? 1 : 0);
            for (int c = 0; c < copies; ++c) {
                sel.matrix.rows.push_back(rows[src]);
                sel.matrix.source_indices.push_back(src);
            }
        }
        return sel;
    }

    // Seeded init: K distinct frames via partial Fisher-Yates.
    rng::Engine eng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng::bounded(eng, n - i));
        std::swap(order[i], order[j]);
    }
    std::vector<FeatureRow> centroids(k);
    for (int c = 0; c < k; ++c) centroids[c] = rows[order[c]];

    std::vector<int> assign(n, -1), prev_assign;
    std::vector<int> sizes(k, 0);
    for (int iter = 0; iter < 100; ++iter) {
        prev_assign = assign;
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_distance(rows[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_distance(rows[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
            ++sizes[best];
        }
        repair_empty_clusters(rows, assign, centroids, sizes);
        if (assign == prev_assign) break;

        for (int c = 0; c < k; ++c) centroids[c].fill(0.0);
        for (int i = 0; i < n; ++i)
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                centroids[assign[i]][f] += rows[i][f];
        for (int c = 0; c < k; ++c)
            for (std::size_t f = 0; f < kFeatureCount; ++f)
                centroids[c][f] /= sizes[c];
    }

    // Medoid of each cluster: minimal summed Euclidean distance to the
    // cluster's members, ties to the smallest frame index.
    std::vector<int> medoids(k, -1);
    std::vector<std::vector<int>> members(k);
    for (int i = 0; i < n; ++i) members[assign[i]].push_back(i);
    for (int c = 0; c < k; ++c) {
        double best_sum = std::numeric_limits<double>::infinity();
        for (int i : members[c]) {
            double s = 0.0;
            for (int j : members[c]) s += row_distance(rows[i], rows[j]);
            if (s < best_sum) {
                best_sum = s;
                medoids[c] = i;
            }
        }
    }

    std::vector<int> ordered = medoids;
    std::sort(ordered.begin(), ordered.end());
    for (int idx : ordered) {
        sel.matrix.rows.push_back(rows[idx]);
        sel.matrix.source_indices.push_back(idx);
    }
    sel.clustered = true;
    sel.assignment = std::move(assign);
    sel.medoids = std::move(medoids);
    return sel;
}

KeyframeMatrix select_keyframes(const std::vector<FrameFeatures>& features, int k,
                                std::uint64_t seed) {
    return select_keyframes_detailed(features, k, seed).matrix;
}

}  // namespace slr
