#include "gw/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace gw {

namespace {

uint32_t quantize(double x, uint32_t peak) {
    const double u = (x + 1.0) / 2.0 * static_cast<double>(peak);
    const double q = std::nearbyint(u);
    if (q <= 0.0) return 0;
    if (q >= static_cast<double>(peak)) return peak;
    return static_cast<uint32_t>(q);
}

void write_png(const std::string& path, const ImageTensor& img, int depth) {
    if (img.c != 3)
        throw std::invalid_argument("write_png: expected 3 channels");
    const int h = img.h, w = img.w;
    const size_t stride = static_cast<size_t>(w) * 3 * (depth == 16 ? 2 : 1);
    std::vector<uint8_t> buf(static_cast<size_t>(h) * stride);
    const uint32_t peak = depth == 16 ? 65535u : 255u;
    for (int y = 0; y < h; ++y) {
        uint8_t* row = &buf[static_cast<size_t>(y) * stride];
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                const uint32_t q = quantize(img.at(y, x, ch), peak);
                if (depth == 16) {
                    *row++ = static_cast<uint8_t>(q >> 8);
                    *row++ = static_cast<uint8_t>(q & 0xFF);
                } else {
                    *row++ = static_cast<uint8_t>(q);
                }
            }
        }
    }
    std::vector<png_bytep> rows(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<size_t>(y)] = &buf[static_cast<size_t>(y) * stride];

    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw std::runtime_error("write_png: cannot open " + path);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("write_png: libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw std::runtime_error("write_png: encode failed for " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w),
                 static_cast<png_uint_32>(h), depth, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

}  // namespace

void write_png16(const std::string& path, const ImageTensor& img) {
    write_png(path, img, 16);
}

void write_png8(const std::string& path, const ImageTensor& img) {
    write_png(path, img, 8);
}

ImageTensor read_png(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp)
        throw std::runtime_error("read_png: cannot open " + path);
    png_structp png =
        png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("read_png: libpng init failed");
    }

    std::vector<uint8_t> buf;
    std::vector<png_bytep> rows;
    int w = 0, h = 0, depth = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error("read_png: decode failed for " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);
    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (color != PNG_COLOR_TYPE_RGB || (depth != 8 && depth != 16)) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw std::runtime_error(
            "read_png: only 8/16-bit RGB is supported: " + path);
    }
    const size_t stride = static_cast<size_t>(w) * 3 * (depth == 16 ? 2 : 1);
    buf.resize(static_cast<size_t>(h) * stride);
    rows.resize(static_cast<size_t>(h));
    for (int y = 0; y < h; ++y)
        rows[static_cast<size_t>(y)] = &buf[static_cast<size_t>(y) * stride];
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    ImageTensor img(h, w, 3);
    const double peak = depth == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < h; ++y) {
        const uint8_t* row = &buf[static_cast<size_t>(y) * stride];
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                uint32_t q;
                if (depth == 16) {
                    q = (static_cast<uint32_t>(row[0]) << 8) | row[1];
                    row += 2;
                } else {
                    q = *row++;
                }
                img.at(y, x, ch) = static_cast<double>(q) / peak * 2.0 - 1.0;
            }
        }
    }
    return img;
}

}  // namespace gw
