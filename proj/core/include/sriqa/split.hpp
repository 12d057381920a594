#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sriqa/manifest.hpp"

namespace sriqa {

/// Content-disjoint train/test partition. Ids are kept sorted so the
/// serialized form is bit-exact across platforms.
struct SplitPlan {
    std::int64_t seed = 0;
    double ratio = 0.8;
    std::vector<std::string> train_ids; // sorted content ids
    std::vector<std::string> test_ids;  // sorted content ids

    bool in_train(const std::string& content_id) const;
    bool in_test(const std::string& content_id) const;
};

enum class SplitMode {
    by_content, // default: no test image shares content with training
    by_method,  // optional: hold out entire SR methods instead
};

/// Deterministic 8:2-style partition of the manifest's content ids (or
/// method ids under SplitMode::by_method). |train| = round(ratio * n),
/// clamped so both sides are nonempty.
SplitPlan make_split(const DatasetManifest& manifest, std::int64_t seed, double ratio,
                     SplitMode mode = SplitMode::by_content);

void save_split(const SplitPlan& plan, const std::string& path);
SplitPlan load_split(const std::string& path);

/// Record indices of the manifest on each side of the plan.
std::vector<std::size_t> train_indices(const DatasetManifest& manifest, const SplitPlan& plan,
                                       SplitMode mode = SplitMode::by_content);
std::vector<std::size_t> test_indices(const DatasetManifest& manifest, const SplitPlan& plan,
                                      SplitMode mode = SplitMode::by_content);

} // namespace sriqa
