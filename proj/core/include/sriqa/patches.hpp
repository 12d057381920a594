#pragma once

#include <utility>
#include <vector>

#include "sriqa/image.hpp"
#include "sriqa/rng.hpp"

namespace sriqa {

struct PatchSpec {
    int size = 224;   // square crop side, pixels
    int stride = 64;  // evaluation tiling step
    int count = 64;   // training crops per step

    void validate() const;
};

using PatchOrigin = std::pair<int, int>; // (x, y) of top-left corner

/// count random crop origins, uniform over the valid placements.
std::vector<PatchOrigin> sample_patch_origins(int width, int height, const PatchSpec& spec,
                                              Rng& rng);

/// Evaluation grid {0, stride, 2*stride, ...} per axis. When (dim - size) is
/// not a multiple of stride, one extra origin at (dim - size) is appended so
/// the tiles cover the image edge-to-edge.
std::vector<int> tile_origins_axis(int dim, int size, int stride);

/// Full tiling grid, rows outer / columns inner.
std::vector<PatchOrigin> tile_origins(int width, int height, const PatchSpec& spec);

ImageU8 crop(const ImageU8& image, int x, int y, int size);

std::vector<ImageU8> sample_training_patches(const ImageU8& image, const PatchSpec& spec,
                                             Rng& rng);

std::vector<ImageU8> tile_eval_patches(const ImageU8& image, const PatchSpec& spec);

} // namespace sriqa
