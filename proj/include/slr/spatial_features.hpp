#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "slr/geometry.hpp"
#include "slr/segmentation.hpp"

namespace slr {

struct TrackingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Overlap { None, ManualFace, ManualNonManual, Unresolved };

const char* to_string(Overlap o);

// Per-frame centroids: c1 face (frozen to frame 0), c2 manual hand,
// c3 non-manual hand, gc pixel-weighted centroid of the visible components.
struct TrackedFrame {
    Point c1, c2, c3, gc;
    Overlap overlap = Overlap::None;
};

// F1 = {d1..d6, theta}: d1..d3 distances from gc to c1..c3, d4..d6 pairwise
// distances (c1,c2), (c1,c3), (c2,c3), theta the angle at c2 between the
// segments c2-c1 and c2-c3, in [0, pi].
struct FrameFeatures {
    double d1 = 0, d2 = 0, d3 = 0, d4 = 0, d5 = 0, d6 = 0;
    double theta = 0;

    std::array<double, 7> as_array() const { return {d1, d2, d3, d4, d5, d6, theta}; }
    static FrameFeatures from_array(const std::array<double, 7>& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5], a[6]};
    }
};

inline constexpr std::size_t kFeatureCount = 7;

// Mean of the previous manual-hand centroid and the merged blob centroid.
Point resolve_overlap_face(const Point& prev_manual, const Point& merged);

// Each hand moves to the mean of its previous centroid and the merged one.
std::pair<Point, Point> resolve_overlap_hands(const Point& prev_manual,
                                              const Point& prev_nonmanual,
                                              const Point& merged);

// Pixel-count-weighted mean of blob centroids; equals the centroid of the
// union pixel set when the blobs are disjoint.
Point global_centroid(const std::vector<ComponentBlob>& blobs);

FrameFeatures compute_features(const TrackedFrame& tf);

struct TrackingOptions {
    // A 2-blob frame counts as an overlap only when the merged candidate
    // holds at least this fraction of the two prior blobs' pixels.
    double merge_area_ratio = 0.7;
};

// Assigns face / manual / non-manual identities across a whole instance.
// Frame 0 must have exactly 3 blobs: face = topmost centroid, the other two
// are provisional hands. Later frames are matched to prior positions by
// nearest centroid; 2-blob frames go through overlap resolution. Manual vs
// non-manual is decided globally after the pass (larger total path length;
// ties: leftmost in frame 0) and labels are rewritten consistently.
// Frames that cannot be interpreted are flagged Unresolved and should be
// skipped by downstream feature consumers.
std::vector<TrackedFrame> assign_identities(
    const std::vector<std::vector<ComponentBlob>>& blobs_per_frame,
    const TrackingOptions& opts = {});

}  // namespace slr
