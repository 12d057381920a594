#include "sriqa/patches.hpp"

#include <cstring>

#include "sriqa/error.hpp"

namespace sriqa {

void PatchSpec::validate() const {
    if (size <= 0) throw Error(ErrorKind::invalid_config, "patch size must be > 0");
    if (stride <= 0) throw Error(ErrorKind::invalid_config, "patch stride must be > 0");
    if (count <= 0) throw Error(ErrorKind::invalid_config, "patch count must be > 0");
}

namespace {

void require_fits(int width, int height, int size) {
    if (width < size || height < size)
        throw Error(ErrorKind::too_small_image,
                    std::to_string(width) + "x" + std::to_string(height) +
                        " image cannot hold a " + std::to_string(size) + "px patch");
}

} // namespace

std::vector<PatchOrigin> sample_patch_origins(int width, int height, const PatchSpec& spec,
                                              Rng& rng) {
    spec.validate();
    require_fits(width, height, spec.size);
    const std::uint64_t span_x = static_cast<std::uint64_t>(width - spec.size) + 1;
    const std::uint64_t span_y = static_cast<std::uint64_t>(height - spec.size) + 1;
    std::vector<PatchOrigin> origins;
    origins.reserve(spec.count);
    for (int i = 0; i < spec.count; ++i) {
        const int x = static_cast<int>(rng.next_below(span_x));
        const int y = static_cast<int>(rng.next_below(span_y));
        origins.emplace_back(x, y);
    }
    return origins;
}

std::vector<int> tile_origins_axis(int dim, int size, int stride) {
    std::vector<int> origins;
    const int last = dim - size;
    for (int o = 0; o <= last; o += stride) origins.push_back(o);
    if (origins.back() != last) origins.push_back(last);
    return origins;
}

std::vector<PatchOrigin> tile_origins(int width, int height, const PatchSpec& spec) {
    spec.validate();
    require_fits(width, height, spec.size);
    const auto xs = tile_origins_axis(width, spec.size, spec.stride);
    const auto ys = tile_origins_axis(height, spec.size, spec.stride);
    std::vector<PatchOrigin> origins;
    origins.reserve(xs.size() * ys.size());
    for (int y : ys)
        for (int x : xs) origins.emplace_back(x, y);
    return origins;
}

ImageU8 crop(const ImageU8& image, int x, int y, int size) {
    ImageU8 out(size, size);
    for (int row = 0; row < size; ++row) {
        const std::uint8_t* src =
            image.pixels.data() + (static_cast<std::size_t>(y + row) * image.width + x) * 3;
        std::memcpy(out.pixels.data() + static_cast<std::size_t>(row) * size * 3, src,
                    static_cast<std::size_t>(size) * 3);
    }
    return out;
}

std::vector<ImageU8> sample_training_patches(const ImageU8& image, const PatchSpec& spec,
                                             Rng& rng) {
    const auto origins = sample_patch_origins(image.width, image.height, spec, rng);
    std::vector<ImageU8> patches;
    patches.reserve(origins.size());
    for (const auto& [x, y] : origins) patches.push_back(crop(image, x, y, spec.size));
    return patches;
}

std::vector<ImageU8> tile_eval_patches(const ImageU8& image, const PatchSpec& spec) {
    const auto origins = tile_origins(image.width, image.height, spec);
    std::vector<ImageU8> patches;
    patches.reserve(origins.size());
    for (const auto& [x, y] : origins) patches.push_back(crop(image, x, y, spec.size));
    return patches;
}

} // namespace sriqa
