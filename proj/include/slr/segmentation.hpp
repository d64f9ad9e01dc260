#pragma once

#include <stdexcept>
#include <vector>

#include "slr/geometry.hpp"
#include "slr/image.hpp"

namespace slr {

struct SegmentationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Skin decision: hue inside [h_lo, h_hi] (circular, so h_lo > h_hi wraps
// through 0) and saturation inside [s_lo, s_hi]. With `adaptive` set, s_lo
// is replaced per frame by Otsu's threshold on the saturation histogram;
// if the histogram is degenerate (single occupied bin) the configured s_lo
// is kept.
struct SkinConfig {
    double h_lo = 0.0;
    double h_hi = 50.0;
    double s_lo = 0.23;
    double s_hi = 0.68;
    bool adaptive = false;

    friend bool operator==(const SkinConfig&, const SkinConfig&) = default;
};

struct MorphConfig {
    int kernel = 3;      // square structuring element side, odd
    int iterations = 2;  // rounds of opening-then-closing

    friend bool operator==(const MorphConfig&, const MorphConfig&) = default;
};

struct PixelRun {
    int y = 0;
    int x_begin = 0;
    int length = 0;

    friend bool operator==(const PixelRun&, const PixelRun&) = default;
};

// A connected skin region. Centroid is the arithmetic mean of member pixel
// coordinates; bbox bounds are inclusive.
struct ComponentBlob {
    long pixel_count = 0;
    Point centroid;
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
    std::vector<PixelRun> runs;  // run-length pixel membership, row-major
};

HsvFrame rgb_to_hsv(const RgbFrame& frame);

BinaryMask skin_mask(const HsvFrame& frame, const SkinConfig& cfg);

// Otsu's threshold on a [0,1]-valued channel histogram (256 bins); returns
// the lower edge of the first above-threshold bin, or `fallback` when the
// histogram is degenerate. Exposed for tests.
double otsu_threshold(const std::vector<float>& values, double fallback);

// `cfg.iterations` rounds of (opening then closing) with a square element.
// Stops early once a round leaves the mask unchanged, so iteration counts
// beyond stabilization are no-ops.
BinaryMask morph_cleanup(const BinaryMask& mask, const MorphConfig& cfg);

// 8-connected components with pixel_count >= min_area, sorted by pixel
// count descending (ties: topmost, then leftmost bbox corner).
std::vector<ComponentBlob> extract_components(const BinaryMask& mask, long min_area);

}  // namespace slr
