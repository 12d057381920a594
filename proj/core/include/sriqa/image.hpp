#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sriqa {

/// 8-bit RGB image, interleaved row-major (HWC).
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // height * width * 3

    ImageU8() = default;
    ImageU8(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
    }
};

/// Planar float image in [0,1], used as the resampling workspace.
struct ImageF {
    int width = 0;
    int height = 0;
    std::vector<double> pixels; // 3 planes of height * width

    ImageF() = default;
    ImageF(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    double& at(int x, int y, int c) {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    double at(int x, int y, int c) const {
        return pixels[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
};

ImageF to_float(const ImageU8& img);
ImageU8 to_u8(const ImageF& img); // clamps and rounds half away from zero

ImageU8 read_png(const std::string& path);
void write_png(const std::string& path, const ImageU8& img);

/// Box-filter (area-average) resize. Handles fractional source boxes, so any
/// target size works; an integer downscale reduces to an exact block mean.
ImageF resize_area(const ImageF& src, int out_w, int out_h);

/// Bilinear resize with half-pixel centers (src = (dst + 0.5) * scale - 0.5).
ImageF resize_bilinear(const ImageF& src, int out_w, int out_h);

/// PSNR in dB over all three channels, intensities in [0,1].
/// Identical images give +inf.
double psnr(const ImageU8& a, const ImageU8& b);

} // namespace sriqa
