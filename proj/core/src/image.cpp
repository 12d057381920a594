#include "sriqa/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include <png.h>

#include "sriqa/error.hpp"

namespace sriqa {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

ImageF to_float(const ImageU8& img) {
    ImageF out(img.width, img.height);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                out.at(x, y, c) = img.at(x, y, c) / 255.0;
    return out;
}

ImageU8 to_u8(const ImageF& img) {
    ImageU8 out(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = std::clamp(img.at(x, y, c), 0.0, 1.0) * 255.0;
                out.at(x, y, c) = static_cast<std::uint8_t>(std::lround(v));
            }
    return out;
}

ImageU8 read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw Error(ErrorKind::io, "cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorKind::io, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error(ErrorKind::io, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(ErrorKind::io, "png decode failed for " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    // normalize everything to 8-bit RGB
    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);

    ImageU8 img(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = img.pixels.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png(const std::string& path, const ImageU8& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw Error(ErrorKind::io, "cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(ErrorKind::io, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(ErrorKind::io, "png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(ErrorKind::io, "png encode failed for " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(y) * img.width * 3);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageF resize_area(const ImageF& src, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw Error(ErrorKind::invalid_input, "resize target must be positive");
    ImageF out(out_w, out_h);
    const double rx = static_cast<double>(src.width) / out_w;
    const double ry = static_cast<double>(src.height) / out_h;

    for (int c = 0; c < 3; ++c) {
        for (int oy = 0; oy < out_h; ++oy) {
            const double y0 = oy * ry;
            const double y1 = (oy + 1) * ry;
            const int iy0 = static_cast<int>(std::floor(y0));
            const int iy1 = std::min(static_cast<int>(std::ceil(y1)), src.height);
            for (int ox = 0; ox < out_w; ++ox) {
                const double x0 = ox * rx;
                const double x1 = (ox + 1) * rx;
                const int ix0 = static_cast<int>(std::floor(x0));
                const int ix1 = std::min(static_cast<int>(std::ceil(x1)), src.width);

                double acc = 0.0;
                double area = 0.0;
                for (int iy = iy0; iy < iy1; ++iy) {
                    const double wy = std::min<double>(iy + 1, y1) - std::max<double>(iy, y0);
                    for (int ix = ix0; ix < ix1; ++ix) {
                        const double wx = std::min<double>(ix + 1, x1) - std::max<double>(ix, x0);
                        acc += wx * wy * src.at(ix, iy, c);
                        area += wx * wy;
                    }
                }
                out.at(ox, oy, c) = acc / area;
            }
        }
    }
    return out;
}

ImageF resize_bilinear(const ImageF& src, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw Error(ErrorKind::invalid_input, "resize target must be positive");
    ImageF out(out_w, out_h);
    const double rx = static_cast<double>(src.width) / out_w;
    const double ry = static_cast<double>(src.height) / out_h;

    for (int c = 0; c < 3; ++c) {
        for (int oy = 0; oy < out_h; ++oy) {
            const double sy = (oy + 0.5) * ry - 0.5;
            const int y0 = static_cast<int>(std::floor(sy));
            const double fy = sy - y0;
            const int cy0 = std::clamp(y0, 0, src.height - 1);
            const int cy1 = std::clamp(y0 + 1, 0, src.height - 1);
            for (int ox = 0; ox < out_w; ++ox) {
                const double sx = (ox + 0.5) * rx - 0.5;
                const int x0 = static_cast<int>(std::floor(sx));
                const double fx = sx - x0;
                const int cx0 = std::clamp(x0, 0, src.width - 1);
                const int cx1 = std::clamp(x0 + 1, 0, src.width - 1);

                const double top = src.at(cx0, cy0, c) * (1.0 - fx) + src.at(cx1, cy0, c) * fx;
                const double bot = src.at(cx0, cy1, c) * (1.0 - fx) + src.at(cx1, cy1, c) * fx;
                out.at(ox, oy, c) = top * (1.0 - fy) + bot * fy;
            }
        }
    }
    return out;
}

double psnr(const ImageU8& a, const ImageU8& b) {
    if (a.width != b.width || a.height != b.height)
        throw Error(ErrorKind::invalid_input, "psnr requires equal image sizes");
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = (a.pixels[i] - b.pixels[i]) / 255.0;
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.pixels.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

} // namespace sriqa
