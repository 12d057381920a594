#include "sriqa/textures.hpp"

#include <algorithm>
#include <cmath>

#include "sriqa/error.hpp"
#include "sriqa/rng.hpp"

namespace sriqa {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Bilinearly interpolated random lattice, values in [-1, 1].
std::vector<double> value_noise(int size, int spacing, Rng& rng) {
    const int cells = size / spacing + 2;
    std::vector<double> lattice(static_cast<std::size_t>(cells) * cells);
    for (auto& v : lattice) v = rng.next_double() * 2.0 - 1.0;

    std::vector<double> plane(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y) {
        const double gy = static_cast<double>(y) / spacing;
        const int iy = static_cast<int>(gy);
        const double fy = gy - iy;
        for (int x = 0; x < size; ++x) {
            const double gx = static_cast<double>(x) / spacing;
            const int ix = static_cast<int>(gx);
            const double fx = gx - ix;
            const double v00 = lattice[static_cast<std::size_t>(iy) * cells + ix];
            const double v10 = lattice[static_cast<std::size_t>(iy) * cells + ix + 1];
            const double v01 = lattice[static_cast<std::size_t>(iy + 1) * cells + ix];
            const double v11 = lattice[static_cast<std::size_t>(iy + 1) * cells + ix + 1];
            const double top = v00 * (1.0 - fx) + v10 * fx;
            const double bot = v01 * (1.0 - fx) + v11 * fx;
            plane[static_cast<std::size_t>(y) * size + x] = top * (1.0 - fy) + bot * fy;
        }
    }
    return plane;
}

void add_grating(std::vector<double>& plane, int size, double amp,
                 double fx, double fy, double phase) {
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x)
            plane[static_cast<std::size_t>(y) * size + x] +=
                amp * std::sin(kTwoPi * (fx * x + fy * y) / size + phase);
}

void add_soft_ellipse(std::vector<double>& plane, int size, double cx, double cy,
                      double rx, double ry, double amp, double softness) {
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double dx = (x - cx) / rx;
            const double dy = (y - cy) / ry;
            const double d = std::sqrt(dx * dx + dy * dy) - 1.0;
            plane[static_cast<std::size_t>(y) * size + x] +=
                amp / (1.0 + std::exp(d / softness));
        }
}

} // namespace

std::vector<ImageU8> make_source_textures(int count, int size, std::uint64_t seed) {
    if (count < 1) throw Error(ErrorKind::invalid_config, "texture count must be >= 1");
    if (size < 16) throw Error(ErrorKind::invalid_config, "texture size must be >= 16");

    std::vector<ImageU8> images;
    images.reserve(count);

    Rng master(seed);
    for (int i = 0; i < count; ++i) {
        Rng rng = master.stream(static_cast<std::uint64_t>(i) + 1);

        // spectral profile: sharpness scales the fine octaves, so the corpus
        // spans smooth through crisp content. The range is deliberately
        // narrow: a near-flat texture reconstructs almost perfectly at every
        // scale, and too wide a spread smears the per-scale quality bands
        // into each other.
        const double sharpness = 0.55 + 0.1 * rng.next_double();

        std::vector<double> lum(static_cast<std::size_t>(size) * size, 0.0);
        // Octave spacings bracket the detail each upscaling factor destroys,
        // and the flat-ish amplitude ladder keeps real energy in the fine
        // octaves; a steeper ladder would leave reconstruction quality nearly
        // scale-independent and fold the per-scale bands together.
        const int octaves[] = {48, 24, 12, 6, 3};
        double amp = 1.0;
        for (int o = 0; o < 5; ++o) {
            const double fine = o >= 2 ? (0.15 + 0.85 * sharpness) : 1.0;
            const double jitter = 0.9 + 0.2 * rng.next_double();
            auto plane = value_noise(size, octaves[o], rng);
            const double a = amp * fine * jitter;
            for (std::size_t k = 0; k < lum.size(); ++k) lum[k] += a * plane[k];
            amp *= 0.8;
        }

        // two gratings per image, pinned to a mid-frequency band: frequency
        // decides which downscales erase a grating, so a wide range here
        // would dominate the within-scale quality spread
        for (int g = 0; g < 2; ++g) {
            const double f = size * sharpness * (0.09 + 0.07 * rng.next_double());
            const double angle = rng.next_double() * kTwoPi;
            add_grating(lum, size, 0.1 + 0.06 * rng.next_double(),
                        f * std::cos(angle), f * std::sin(angle),
                        rng.next_double() * kTwoPi);
        }

        const int n_shapes = 2 + static_cast<int>(rng.next_below(3));
        for (int s = 0; s < n_shapes; ++s) {
            add_soft_ellipse(lum, size,
                             rng.next_double() * size, rng.next_double() * size,
                             size * (0.08 + 0.25 * rng.next_double()),
                             size * (0.08 + 0.25 * rng.next_double()),
                             (rng.next_double() * 2.0 - 1.0) * 0.8,
                             0.01 + (1.0 - sharpness) * 0.15 + 0.05 * rng.next_double());
        }

        // rescale luminance into [0.08, 0.92] with a little headroom
        const auto [lo_it, hi_it] = std::minmax_element(lum.begin(), lum.end());
        const double lo = *lo_it, hi = *hi_it;
        const double span = hi > lo ? hi - lo : 1.0;

        // low-frequency chroma tints, correlated across the image
        auto tint_r = value_noise(size, size / 2, rng);
        auto tint_b = value_noise(size, size / 2, rng);
        const double tint_amp = 0.05 + 0.1 * rng.next_double();

        ImageF img(size, size);
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x) {
                const std::size_t k = static_cast<std::size_t>(y) * size + x;
                const double l = 0.08 + 0.84 * (lum[k] - lo) / span;
                img.at(x, y, 0) = std::clamp(l + tint_amp * tint_r[k], 0.0, 1.0);
                img.at(x, y, 1) = l;
                img.at(x, y, 2) = std::clamp(l + tint_amp * tint_b[k], 0.0, 1.0);
            }
        images.push_back(to_u8(img));
    }
    return images;
}

} // namespace sriqa
