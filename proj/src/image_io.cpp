#include "slr/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace slr {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw ImageIoError(path.string() + ": " + what);
}

// Skips PPM whitespace and '#' comment lines.
int ppm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return c;
}

RgbFrame read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open file");
    std::string tok;
    ppm_next_token(in, tok);
    if (tok != "P6") fail(path, "not a binary PPM (P6) file");
    long w = 0, h = 0, maxval = 0;
    try {
        ppm_next_token(in, tok);
        w = std::stol(tok);
        ppm_next_token(in, tok);
        h = std::stol(tok);
        ppm_next_token(in, tok);
        maxval = std::stol(tok);
    } catch (const std::exception&) {
        fail(path, "malformed PPM header");
    }
    if (w <= 0 || h <= 0) fail(path, "non-positive PPM dimensions");
    if (maxval != 255) fail(path, "unsupported PPM maxval (want 255)");

    RgbFrame frame;
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.pixels.resize(static_cast<std::size_t>(3) * w * h);
    in.read(reinterpret_cast<char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(frame.pixels.size()))
        fail(path, "truncated PPM pixel data");
    return frame;
}

RgbFrame read_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) fail(path, "cannot open file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    RgbFrame frame;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "undecodable PNG");
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "PNG not reducible to 8-bit RGB");
    }
    frame.width = static_cast<int>(w);
    frame.height = static_cast<int>(h);
    frame.pixels.resize(static_cast<std::size_t>(3) * w * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = frame.pixels.data() + static_cast<std::size_t>(3) * w * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return frame;
}

}  // namespace

RgbFrame read_image(const std::filesystem::path& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "missing or unreadable file");
    unsigned char magic[2] = {0, 0};
    probe.read(reinterpret_cast<char*>(magic), 2);
    probe.close();
    if (magic[0] == 0x89 && magic[1] == 'P') return read_png(path);
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    fail(path, "unrecognized image format (want PNG or P6 PPM)");
}

void write_ppm(const std::filesystem::path& path, const RgbFrame& frame) {
    if (!frame.valid()) fail(path, "invalid frame");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(path, "cannot open file for writing");
    out << "P6\n" << frame.width << " " << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()),
              static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) fail(path, "write failed");
}

void write_png(const std::filesystem::path& path, const RgbFrame& frame) {
    if (!frame.valid()) fail(path, "invalid frame");
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG encode failed");
    }
    png_init_io(png, fp.get());
    png_set_compression_level(png, 1);
    png_set_IHDR(png, info, frame.width, frame.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < frame.height; ++y) {
        png_write_row(png, const_cast<png_bytep>(
                               frame.pixels.data() + static_cast<std::size_t>(3) * frame.width * y));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
    if (mask.width <= 0 || mask.height <= 0) fail(path, "invalid mask");
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) fail(path, "cannot open file for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "PNG encode failed");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, mask.width, mask.height, 1, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int stride = (mask.width + 7) / 8;
    std::vector<png_byte> row(static_cast<std::size_t>(stride));
    for (int y = 0; y < mask.height; ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < mask.width; ++x)
            if (mask.at(x, y)) row[x / 8] |= static_cast<png_byte>(0x80 >> (x % 8));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace slr
