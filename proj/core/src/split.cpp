#include "sriqa/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "sriqa/error.hpp"
#include "sriqa/rng.hpp"

using nlohmann::json;

namespace sriqa {

bool SplitPlan::in_train(const std::string& content_id) const {
    return std::binary_search(train_ids.begin(), train_ids.end(), content_id);
}

bool SplitPlan::in_test(const std::string& content_id) const {
    return std::binary_search(test_ids.begin(), test_ids.end(), content_id);
}

SplitPlan make_split(const DatasetManifest& manifest, std::int64_t seed, double ratio,
                     SplitMode mode) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw Error(ErrorKind::cannot_split, "ratio must lie in (0,1)");

    std::set<std::string> ids_set;
    for (const auto& rec : manifest.records)
        ids_set.insert(mode == SplitMode::by_content ? rec.content_id : rec.method_id);

    std::vector<std::string> ids(ids_set.begin(), ids_set.end());
    if (ids.size() < 2)
        throw Error(ErrorKind::cannot_split, "need at least 2 distinct ids to split");

    // shuffle order depends only on the sorted id set and the seed
    Rng rng(static_cast<std::uint64_t>(seed));
    Rng stream = rng.stream(0x73706c6974ULL); // "split"
    stream.shuffle(ids);

    const auto n = static_cast<std::int64_t>(ids.size());
    std::int64_t n_train = std::llround(ratio * static_cast<double>(n));
    n_train = std::clamp<std::int64_t>(n_train, 1, n - 1);

    SplitPlan plan;
    plan.seed = seed;
    plan.ratio = ratio;
    plan.train_ids.assign(ids.begin(), ids.begin() + n_train);
    plan.test_ids.assign(ids.begin() + n_train, ids.end());
    std::sort(plan.train_ids.begin(), plan.train_ids.end());
    std::sort(plan.test_ids.begin(), plan.test_ids.end());
    return plan;
}

void save_split(const SplitPlan& plan, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path);
    json j = {
        {"seed", plan.seed},
        {"ratio", plan.ratio},
        {"train_ids", plan.train_ids},
        {"test_ids", plan.test_ids},
    };
    out << j.dump(2) << "\n";
}

SplitPlan load_split(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::io, "bad split JSON in " + path);
    SplitPlan plan;
    plan.seed = j.at("seed").get<std::int64_t>();
    plan.ratio = j.at("ratio").get<double>();
    plan.train_ids = j.at("train_ids").get<std::vector<std::string>>();
    plan.test_ids = j.at("test_ids").get<std::vector<std::string>>();
    std::sort(plan.train_ids.begin(), plan.train_ids.end());
    std::sort(plan.test_ids.begin(), plan.test_ids.end());
    return plan;
}

namespace {

std::vector<std::size_t> side_indices(const DatasetManifest& manifest,
                                      const std::vector<std::string>& ids, SplitMode mode) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const auto& key = mode == SplitMode::by_content ? manifest.records[i].content_id
                                                        : manifest.records[i].method_id;
        if (std::binary_search(ids.begin(), ids.end(), key)) out.push_back(i);
    }
    return out;
}

} // namespace

std::vector<std::size_t> train_indices(const DatasetManifest& manifest, const SplitPlan& plan,
                                       SplitMode mode) {
    return side_indices(manifest, plan.train_ids, mode);
}

std::vector<std::size_t> test_indices(const DatasetManifest& manifest, const SplitPlan& plan,
                                      SplitMode mode) {
    return side_indices(manifest, plan.test_ids, mode);
}

} // namespace sriqa
