#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sriqa/manifest.hpp"
#include "sriqa/rational.hpp"

namespace sriqa {

/// Configuration for the synthetic SR-degradation benchmark: each source is
/// area-downsampled by a scale, bilinearly upsampled back, and labeled with a
/// squashed PSNR against the original.
struct SynthConfig {
    std::vector<std::string> source_paths; // PNG files, each >= 256x256
    std::vector<Rational> scales;          // each must divide the source sides evenly
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string name = "synthetic";
};

/// Monotone map from PSNR (dB) to a [0,1] quality label.
double squash_psnr(double psnr_db);

/// Generates reconstructions under out_dir/recons/, writes
/// out_dir/manifest.jsonl, and returns the loaded-form manifest.
/// content_id is the source file stem; method_id is "synthetic-bilinear".
DatasetManifest synth_benchmark(const SynthConfig& cfg);

} // namespace sriqa
