#include "slr/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace slr {

HsvFrame rgb_to_hsv(const RgbFrame& frame) {
    HsvFrame out;
    out.width = frame.width;
    out.height = frame.height;
    out.pixels.resize(frame.pixels.size());
    const std::size_t n = frame.pixels.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const float r = frame.pixels[3 * i] / 255.0f;
        const float g = frame.pixels[3 * i + 1] / 255.0f;
        const float b = frame.pixels[3 * i + 2] / 255.0f;
        const float maxc = std::max({r, g, b});
        const float minc = std::min({r, g, b});
        const float delta = maxc - minc;

        float h = 0.0f;
        if (delta > 0.0f) {
            if (maxc == r)
                h = 60.0f * ((g - b) / delta);
            else if (maxc == g)
                h = 60.0f * ((b - r) / delta + 2.0f);
            else
                h = 60.0f * ((r - g) / delta + 4.0f);
            if (h < 0.0f) h += 360.0f;
            if (h >= 360.0f) h -= 360.0f;
        }
        out.pixels[3 * i] = h;
        out.pixels[3 * i + 1] = maxc > 0.0f ? delta / maxc : 0.0f;
        out.pixels[3 * i + 2] = maxc;
    }
    return out;
}

double otsu_threshold(const std::vector<float>& values, double fallback) {
    constexpr int kBins = 256;
    std::array<long, kBins> hist{};
    for (float v : values) {
        int bin = static_cast<int>(v * kBins);
        bin = std::clamp(bin, 0, kBins - 1);
        ++hist[bin];
    }
    const long total = static_cast<long>(values.size());
    if (total == 0) return fallback;

    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += static_cast<double>(b) * hist[b];

    long w0 = 0;
    double sum0 = 0.0;
    double best_var = 0.0;
    int best_t = -1;
    for (int t = 0; t < kBins - 1; ++t) {
        w0 += hist[t];
        sum0 += static_cast<double>(t) * hist[t];
        const long w1 = total - w0;
        if (w0 == 0 || w1 == 0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = static_cast<double>(w0) * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_t = t;
        }
    }
    if (best_t < 0) return fallback;  // single occupied bin
    return (best_t + 1) / static_cast<double>(kBins);
}

BinaryMask skin_mask(const HsvFrame& frame, const SkinConfig& cfg) {
    if (cfg.h_lo < 0.0 || cfg.h_lo >= 360.0 || cfg.h_hi < 0.0 || cfg.h_hi >= 360.0)
        throw SegmentationError("hue bounds must lie in [0,360)");
    if (cfg.s_lo < 0.0 || cfg.s_lo > 1.0 || cfg.s_hi < 0.0 || cfg.s_hi > 1.0)
        throw SegmentationError("saturation bounds must lie in [0,1]");

    double s_lo = cfg.s_lo;
    if (cfg.adaptive) {
        std::vector<float> sat;
        sat.reserve(frame.pixels.size() / 3);
        for (std::size_t i = 1; i < frame.pixels.size(); i += 3) sat.push_back(frame.pixels[i]);
        s_lo = otsu_threshold(sat, cfg.s_lo);
    }

    BinaryMask mask = make_mask(frame.width, frame.height);
    const std::size_t n = frame.pixels.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = frame.pixels[3 * i];
        const double s = frame.pixels[3 * i + 1];
        const bool hue_in = cfg.h_lo <= cfg.h_hi ? (h >= cfg.h_lo && h <= cfg.h_hi)
                                                 : (h >= cfg.h_lo || h <= cfg.h_hi);
        mask.bits[i] = (hue_in && s >= s_lo && s <= cfg.s_hi) ? 1 : 0;
    }
    return mask;
}

namespace {

enum class MorphOp { Erode, Dilate };

// Square elements are separable: a horizontal min/max pass then a vertical
// one. Out-of-frame pixels count as background.
BinaryMask morph_pass(const BinaryMask& in, int radius, MorphOp op) {
    const int w = in.width, h = in.height;
    const std::uint8_t pad = 0;  // out-of-frame is background
    BinaryMask mid = make_mask(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = op == MorphOp::Erode ? 1 : 0;
            for (int dx = -radius; dx <= radius; ++dx) {
                const int xx = x + dx;
                const std::uint8_t v =
                    (xx < 0 || xx >= w) ? pad : in.bits[static_cast<std::size_t>(y) * w + xx];
                if (op == MorphOp::Erode)
                    acc = static_cast<std::uint8_t>(acc & v);
                else
                    acc = static_cast<std::uint8_t>(acc | v);
            }
            mid.bits[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    BinaryMask out = make_mask(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = op == MorphOp::Erode ? 1 : 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = y + dy;
                const std::uint8_t v =
                    (yy < 0 || yy >= h) ? pad : mid.bits[static_cast<std::size_t>(yy) * w + x];
                if (op == MorphOp::Erode)
                    acc = static_cast<std::uint8_t>(acc & v);
                else
                    acc = static_cast<std::uint8_t>(acc | v);
            }
            out.bits[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

BinaryMask morph_cleanup(const BinaryMask& mask, const MorphConfig& cfg) {
    if (cfg.kernel < 1 || cfg.kernel % 2 == 0)
        throw SegmentationError("morphology kernel must be odd and >= 1");
    const int radius = cfg.kernel / 2;
    BinaryMask cur = mask;
    for (int it = 0; it < cfg.iterations; ++it) {
        BinaryMask next = morph_pass(cur, radius, MorphOp::Erode);
        next = morph_pass(next, radius, MorphOp::Dilate);  // opening
        next = morph_pass(next, radius, MorphOp::Dilate);
        next = morph_pass(next, radius, MorphOp::Erode);  // closing
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

std::vector<ComponentBlob> extract_components(const BinaryMask& mask, long min_area) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
    std::vector<ComponentBlob> blobs;
    std::vector<std::size_t> stack;

    for (int sy = 0; sy < h; ++sy) {
        for (int sx = 0; sx < w; ++sx) {
            const std::size_t start = static_cast<std::size_t>(sy) * w + sx;
            if (!mask.bits[start] || label[start] >= 0) continue;

            const int id = static_cast<int>(blobs.size());
            ComponentBlob blob;
            blob.xmin = blob.xmax = sx;
            blob.ymin = blob.ymax = sy;
            double sum_x = 0.0, sum_y = 0.0;

            label[start] = id;
            stack.assign(1, start);
            while (!stack.empty()) {
                const std::size_t p = stack.back();
                stack.pop_back();
                const int x = static_cast<int>(p % w);
                const int y = static_cast<int>(p / w);
                ++blob.pixel_count;
                sum_x += x;
                sum_y += y;
                blob.xmin = std::min(blob.xmin, x);
                blob.xmax = std::max(blob.xmax, x);
                blob.ymin = std::min(blob.ymin, y);
                blob.ymax = std::max(blob.ymax, y);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                        const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.bits[q] && label[q] < 0) {
                            label[q] = id;
                            stack.push_back(q);
                        }
                    }
                }
            }
            blob.centroid = {sum_x / blob.pixel_count, sum_y / blob.pixel_count};
            blobs.push_back(std::move(blob));
        }
    }

    // Row-major RLE of each surviving blob.
    std::vector<ComponentBlob> kept;
    std::vector<int> remap(blobs.size(), -1);
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        if (blobs[i].pixel_count >= min_area) {
            remap[i] = static_cast<int>(kept.size());
            kept.push_back(std::move(blobs[i]));
        }
    }
    for (int y = 0; y < h; ++y) {
        int x = 0;
        while (x < w) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            const int id = label[p] >= 0 ? remap[label[p]] : -1;
            if (id < 0) {
                ++x;
                continue;
            }
            int len = 1;
            while (x + len < w) {
                const std::size_t q = p + len;
                if (label[q] < 0 || remap[label[q]] != id) break;
                ++len;
            }
            kept[id].runs.push_back({y, x, len});
            x += len;
        }
    }

    std::sort(kept.begin(), kept.end(), [](const ComponentBlob& a, const ComponentBlob& b) {
        if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
        if (a.ymin != b.ymin) return a.ymin < b.ymin;
        return a.xmin < b.xmin;
    });
    return kept;
}

}  // namespace slr
