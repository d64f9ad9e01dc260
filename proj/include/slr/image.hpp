#pragma once

#include <cstdint>
#include <vector>

namespace slr {

// 8-bit RGB frame, row-major, three bytes per pixel.
struct RgbFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    bool valid() const {
        return width > 0 && height > 0 &&
               pixels.size() == static_cast<std::size_t>(3) * width * height;
    }
    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }

    friend bool operator==(const RgbFrame&, const RgbFrame&) = default;
};

// Hue in [0,360), saturation and value in [0,1].
struct HsvFrame {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // h,s,v triplets

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;  // one byte per pixel, 0 or 1

    bool at(int x, int y) const {
        return bits[static_cast<std::size_t>(y) * width + x] != 0;
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count_true() const {
        std::size_t n = 0;
        for (auto b : bits) n += b;
        return n;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

inline BinaryMask make_mask(int width, int height, bool fill = false) {
    BinaryMask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
    return m;
}

}  // namespace slr
