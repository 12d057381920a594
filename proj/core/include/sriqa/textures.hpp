#pragma once

#include <cstdint>
#include <vector>

#include "sriqa/image.hpp"

namespace sriqa {

/// Deterministic procedural textures used as source material for the
/// synthetic degradation benchmark. Each image mixes multi-octave value
/// noise, sinusoidal gratings, and soft geometric shapes; the per-image
/// spectral slope is randomized so content ranges from nearly band-limited
/// to high-frequency rich. That spread is what makes reconstruction quality
/// depend on content as well as scale.
std::vector<ImageU8> make_source_textures(int count, int size, std::uint64_t seed);

} // namespace sriqa
