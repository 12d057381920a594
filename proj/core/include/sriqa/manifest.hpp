#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sriqa/rational.hpp"

namespace sriqa {

enum class LabelPolarity {
    higher_is_better, // MOS-style
    higher_is_worse,  // Rank-style
};

const char* to_string(LabelPolarity p);
LabelPolarity polarity_from_string(const std::string& s);

/// One SR image: provenance widths, derived scale, subjective label, and the
/// ids used for content-disjoint splitting and per-method statistics.
struct SampleRecord {
    std::string sr_path;   // relative to the manifest directory
    std::int64_t lr_width = 0;
    std::int64_t hr_width = 0;
    Rational scale;        // hr_width / lr_width, exact
    double label = 0.0;
    std::string content_id;
    std::string method_id;
};

struct DatasetManifest {
    std::string name;
    double label_min = 0.0;
    double label_max = 1.0;
    LabelPolarity polarity = LabelPolarity::higher_is_better;
    std::vector<SampleRecord> records;
    std::string base_dir; // directory the sr_paths are relative to (not serialized)

    /// Validates invariants and derives each record's scale from its widths.
    void validate();

    /// Min-max label normalization to [0,1], flipped for higher_is_worse, so
    /// downstream code always regresses "higher is better".
    double normalized_label(const SampleRecord& rec) const;

    std::string resolve_path(const SampleRecord& rec) const;

    std::vector<std::string> content_ids() const; // sorted, unique
};

/// Line-delimited JSON: one header object, then one record per line.
void save_manifest(const DatasetManifest& manifest, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

} // namespace sriqa
