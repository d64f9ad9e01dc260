#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "slr/image.hpp"

namespace slr {

struct ImageIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Decodes a PNG or binary PPM (P6) file, sniffed by magic bytes.
// PNG inputs are normalized to 8-bit RGB (palette and gray expanded,
// 16-bit narrowed, alpha dropped).
RgbFrame read_image(const std::filesystem::path& path);

void write_ppm(const std::filesystem::path& path, const RgbFrame& frame);
void write_png(const std::filesystem::path& path, const RgbFrame& frame);

// 1-bit grayscale PNG, for mask inspection.
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace slr
