#pragma once

#include <map>
#include <vector>

#include "sriqa/checkpoint.hpp"
#include "sriqa/manifest.hpp"

namespace sriqa {

/// Average ranks (1-based; ties get the mean of their rank span).
std::vector<double> average_ranks(const std::vector<double>& x);

/// Spearman rank correlation: Pearson over average ranks.
double srcc(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson linear correlation.
double plcc(const std::vector<double>& x, const std::vector<double>& y);

/// Kendall tau-b (tie-corrected), computed in O(n log n).
double krcc(const std::vector<double>& x, const std::vector<double>& y);

/// Scores bucketed by exact scale factor.
using GroupedScores = std::map<Rational, std::vector<double>>;

struct AGResult {
    double statistic = 0; // the A value
    double p_value = 1;
    int df = 0; // group count - 1
};

/// Alexander-Govern approximation test for equal means under unequal
/// variances. Each group needs n >= 2 and nonzero sample variance.
AGResult alexander_govern(const GroupedScores& groups);

/// True iff p <= alpha.
inline bool significance_decision(double p, double alpha = 0.05) {
    if (p < 0 || p > 1 || alpha < 0 || alpha > 1)
        throw Error(ErrorKind::invalid_input, "p and alpha must lie in [0,1]");
    return p <= alpha;
}

struct GroupSummary {
    Rational scale;
    int n = 0;
    double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

struct ViolinData {
    GroupedScores groups; // raw labels, grouped by scale
    std::vector<GroupSummary> summaries;
};

/// Raw labels grouped by scale with per-group summaries
/// (linear-interpolation quartiles), ready for external plotting.
ViolinData violin_data(const DatasetManifest& manifest);

/// Manifest labels grouped by scale, optionally restricted to one method and
/// optionally normalized; the input to the omnibus test.
GroupedScores group_scores(const DatasetManifest& manifest,
                           const std::string& method_id = "", bool normalized = false);

/// Cosine similarity between the generated weights of two scales, one matrix
/// per head layer. Rows/cols follow the given scale order. Requires an sgh
/// checkpoint.
std::vector<nn::Mat<double>> weight_similarity(const Checkpoint& checkpoint,
                                               const std::vector<Rational>& scales);

} // namespace sriqa
