#include "slr/spatial_features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slr {

const char* to_string(Overlap o) {
    switch (o) {
        case Overlap::None: return "none";
        case Overlap::ManualFace: return "manual-face";
        case Overlap::ManualNonManual: return "manual-nonmanual";
        case Overlap::Unresolved: return "unresolved";
    }
    return "?";
}

Point resolve_overlap_face(const Point& prev_manual, const Point& merged) {
    return midpoint(prev_manual, merged);
}

std::pair<Point, Point> resolve_overlap_hands(const Point& prev_manual,
                                              const Point& prev_nonmanual,
                                              const Point& merged) {
    return {midpoint(prev_manual, merged), midpoint(prev_nonmanual, merged)};
}

Point global_centroid(const std::vector<ComponentBlob>& blobs) {
    if (blobs.empty()) throw TrackingError("global_centroid of empty blob list");
    double wsum = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& b : blobs) {
        wsum += static_cast<double>(b.pixel_count);
        sx += b.pixel_count * b.centroid.x;
        sy += b.pixel_count * b.centroid.y;
    }
    return {sx / wsum, sy / wsum};
}

FrameFeatures compute_features(const TrackedFrame& tf) {
    FrameFeatures f;
    f.d1 = distance(tf.gc, tf.c1);
    f.d2 = distance(tf.gc, tf.c2);
    f.d3 = distance(tf.gc, tf.c3);
    f.d4 = distance(tf.c1, tf.c2);
    f.d5 = distance(tf.c1, tf.c3);
    f.d6 = distance(tf.c2, tf.c3);

    const Point u = tf.c1 - tf.c2;
    const Point v = tf.c3 - tf.c2;
    const double nu = std::hypot(u.x, u.y);
    const double nv = std::hypot(v.x, v.y);
    if (nu == 0.0 || nv == 0.0) {
        f.theta = 0.0;
    } else {
        const double c = std::clamp((u.x * v.x + u.y * v.y) / (nu * nv), -1.0, 1.0);
        f.theta = std::acos(c);
    }
    return f;
}

namespace {

// Internal roles. Hands keep provisional ids until the whole-video pass
// decides which one is manual.
enum Role { kFace = 0, kHandA = 1, kHandB = 2 };

struct FrameRecord {
    Point hand[2];           // positions of handA, handB after resolution
    Point gc;
    Overlap kind = Overlap::None;
};

struct TrackState {
    Point pos[3];
    long count[3] = {0, 0, 0};
};

double assignment_cost(const TrackState& st, const std::vector<ComponentBlob>& blobs,
                       const int perm[3]) {
    double c = 0.0;
    for (int r = 0; r < 3; ++r) c += distance(st.pos[r], blobs[perm[r]].centroid);
    return c;
}

}  // namespace

std::vector<TrackedFrame> assign_identities(
    const std::vector<std::vector<ComponentBlob>>& blobs_per_frame,
    const TrackingOptions& opts) {
    if (blobs_per_frame.empty()) throw TrackingError("no frames to track");
    const auto& first = blobs_per_frame.front();
    if (first.size() != 3)
        throw TrackingError("first frame must contain exactly 3 components, got " +
                            std::to_string(first.size()));

    // Frame 0: face is the topmost centroid, hands ordered left to right.
    int face_idx = 0;
    for (int i = 1; i < 3; ++i) {
        const Point& a = first[i].centroid;
        const Point& f = first[face_idx].centroid;
        if (a.y < f.y || (a.y == f.y && a.x < f.x)) face_idx = i;
    }
    int hand_idx[2];
    int k = 0;
    for (int i = 0; i < 3; ++i)
        if (i != face_idx) hand_idx[k++] = i;
    {
        const Point& a = first[hand_idx[0]].centroid;
        const Point& b = first[hand_idx[1]].centroid;
        if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(hand_idx[0], hand_idx[1]);
    }

    TrackState st;
    st.pos[kFace] = first[face_idx].centroid;
    st.pos[kHandA] = first[hand_idx[0]].centroid;
    st.pos[kHandB] = first[hand_idx[1]].centroid;
    for (int r = 0; r < 3; ++r) st.count[r] = 0;
    st.count[kFace] = first[face_idx].pixel_count;
    st.count[kHandA] = first[hand_idx[0]].pixel_count;
    st.count[kHandB] = first[hand_idx[1]].pixel_count;

    const Point face0 = st.pos[kFace];

    std::vector<FrameRecord> records(blobs_per_frame.size());
    records[0] = {{st.pos[kHandA], st.pos[kHandB]}, global_centroid(first), Overlap::None};

    for (std::size_t i = 1; i < blobs_per_frame.size(); ++i) {
        const auto& blobs = blobs_per_frame[i];
        FrameRecord rec;
        rec.kind = Overlap::Unresolved;

        if (blobs.size() == 3) {
            static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                            {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
            int best = 0;
            double best_cost = assignment_cost(st, blobs, perms[0]);
            for (int p = 1; p < 6; ++p) {
                const double c = assignment_cost(st, blobs, perms[p]);
                if (c < best_cost) {
                    best_cost = c;
                    best = p;
                }
            }
            for (int r = 0; r < 3; ++r) {
                st.pos[r] = blobs[perms[best][r]].centroid;
                st.count[r] = blobs[perms[best][r]].pixel_count;
            }
            rec.kind = Overlap::None;
        } else if (blobs.size() == 2) {
            // Interpret one blob as a merged pair of components and the
            // other as the remaining free component. The winning
            // interpretation minimizes distance of the merged blob to the
            // midpoint of the pair's prior centroids plus distance of the
            // free blob to the free role's prior centroid.
            static const int pairs[3][2] = {{kFace, kHandA}, {kFace, kHandB}, {kHandA, kHandB}};
            int best_pair = -1, best_m = 0;
            double best_cost = std::numeric_limits<double>::infinity();
            for (int p = 0; p < 3; ++p) {
                const int free_role = 3 - pairs[p][0] - pairs[p][1];
                for (int m = 0; m < 2; ++m) {
                    const double c =
                        distance(blobs[m].centroid,
                                 midpoint(st.pos[pairs[p][0]], st.pos[pairs[p][1]])) +
                        distance(blobs[1 - m].centroid, st.pos[free_role]);
                    if (c < best_cost) {
                        best_cost = c;
                        best_pair = p;
                        best_m = m;
                    }
                }
            }
            const int ra = pairs[best_pair][0], rb = pairs[best_pair][1];
            const ComponentBlob& merged = blobs[best_m];
            const ComponentBlob& free_blob = blobs[1 - best_m];
            const bool big_enough =
                merged.pixel_count >=
                opts.merge_area_ratio * static_cast<double>(st.count[ra] + st.count[rb]);

            if (big_enough && ra == kHandA && rb == kHandB) {
                auto [a, b] = resolve_overlap_hands(st.pos[kHandA], st.pos[kHandB],
                                                    merged.centroid);
                st.pos[kHandA] = a;
                st.pos[kHandB] = b;
                st.pos[kFace] = free_blob.centroid;
                st.count[kFace] = free_blob.pixel_count;
                rec.kind = Overlap::ManualNonManual;
            } else if (big_enough && ra == kFace) {
                // A hand merged with the face. Accept only if that hand was
                // the one nearer the face in the previous frame; otherwise
                // the event is ambiguous and the frame stays unresolved.
                const int hand = rb;
                const int other = hand == kHandA ? kHandB : kHandA;
                if (distance(st.pos[hand], st.pos[kFace]) <=
                    distance(st.pos[other], st.pos[kFace])) {
                    st.pos[hand] = resolve_overlap_face(st.pos[hand], merged.centroid);
                    st.pos[other] = free_blob.centroid;
                    st.count[other] = free_blob.pixel_count;
                    rec.kind = Overlap::ManualFace;
                }
            }
        }

        rec.hand[0] = st.pos[kHandA];
        rec.hand[1] = st.pos[kHandB];
        rec.gc = blobs.empty() ? records[i - 1].gc : global_centroid(blobs);
        records[i] = rec;
    }

    // Whole-video manual/non-manual decision: larger total path length is
    // the manual hand; ties go to the hand that started leftmost (handA).
    double path[2] = {0.0, 0.0};
    for (std::size_t i = 1; i < records.size(); ++i) {
        path[0] += distance(records[i - 1].hand[0], records[i].hand[0]);
        path[1] += distance(records[i - 1].hand[1], records[i].hand[1]);
    }
    const int manual = path[1] > path[0] ? 1 : 0;

    std::vector<TrackedFrame> out(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        out[i].c1 = face0;
        out[i].c2 = records[i].hand[manual];
        out[i].c3 = records[i].hand[1 - manual];
        out[i].gc = records[i].gc;
        out[i].overlap = records[i].kind;
    }
    return out;
}

}  // namespace slr
