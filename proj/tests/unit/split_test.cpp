#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "sriqa/error.hpp"
#include "sriqa/split.hpp"

using namespace sriqa;

namespace {

DatasetManifest manifest_with(int contents, int scales_per_content) {
    DatasetManifest m;
    m.label_min = 0.0;
    m.label_max = 1.0;
    for (int c = 0; c < contents; ++c)
        for (int s = 0; s < scales_per_content; ++s) {
            SampleRecord rec;
            rec.sr_path = "img" + std::to_string(c) + "_" + std::to_string(s) + ".png";
            rec.hr_width = 288;
            rec.lr_width = 288 / (s + 2);
            rec.label = 0.5;
            rec.content_id = "c" + std::to_string(c);
            rec.method_id = s % 2 == 0 ? "m0" : "m1";
            m.records.push_back(rec);
        }
    m.validate();
    return m;
}

} // namespace

TEST_CASE("splits partition the content ids with round(ratio*n) on the train side") {
    const DatasetManifest m = manifest_with(10, 3);
    const SplitPlan plan = make_split(m, 4, 0.8);

    CHECK(plan.train_ids.size() == 8);
    CHECK(plan.test_ids.size() == 2);
    CHECK(std::is_sorted(plan.train_ids.begin(), plan.train_ids.end()));
    CHECK(std::is_sorted(plan.test_ids.begin(), plan.test_ids.end()));

    std::set<std::string> all(plan.train_ids.begin(), plan.train_ids.end());
    all.insert(plan.test_ids.begin(), plan.test_ids.end());
    CHECK(all.size() == 10); // disjoint: 8 + 2 distinct ids
    for (const auto& id : m.content_ids()) CHECK(all.count(id) == 1);
}

TEST_CASE("extreme ratios still leave both sides nonempty") {
    const DatasetManifest m = manifest_with(5, 1);
    CHECK(make_split(m, 0, 0.01).train_ids.size() == 1);
    CHECK(make_split(m, 0, 0.99).test_ids.size() == 1);
    CHECK_THROWS_AS(make_split(m, 0, 0.0), Error);
    CHECK_THROWS_AS(make_split(m, 0, 1.0), Error);

    const DatasetManifest single = manifest_with(1, 3);
    CHECK_THROWS_AS(make_split(single, 0, 0.8), Error);
}

TEST_CASE("the plan is a pure function of seed and id set") {
    const DatasetManifest m = manifest_with(12, 2);
    const SplitPlan a = make_split(m, 9, 0.75);
    const SplitPlan b = make_split(m, 9, 0.75);
    CHECK(a.train_ids == b.train_ids);
    CHECK(a.test_ids == b.test_ids);

    // record order must not matter, only the distinct ids
    DatasetManifest shuffled = m;
    std::reverse(shuffled.records.begin(), shuffled.records.end());
    const SplitPlan c = make_split(shuffled, 9, 0.75);
    CHECK(c.train_ids == a.train_ids);

    bool any_differ = false;
    for (std::int64_t seed = 10; seed < 15; ++seed)
        any_differ |= make_split(m, seed, 0.75).test_ids != a.test_ids;
    CHECK(any_differ);
}

TEST_CASE("record indices land on the side owning their content, or method") {
    const DatasetManifest m = manifest_with(6, 4);
    const SplitPlan plan = make_split(m, 2, 0.8);

    const auto train = train_indices(m, plan);
    const auto test = test_indices(m, plan);
    CHECK(train.size() + test.size() == m.records.size());
    for (auto i : train) CHECK(plan.in_train(m.records[i].content_id));
    for (auto i : test) {
        CHECK(plan.in_test(m.records[i].content_id));
        CHECK_FALSE(plan.in_train(m.records[i].content_id));
    }

    const SplitPlan by_method = make_split(m, 2, 0.5, SplitMode::by_method);
    CHECK(by_method.train_ids.size() + by_method.test_ids.size() == 2); // m0, m1
    const auto mtrain = train_indices(m, by_method, SplitMode::by_method);
    for (auto i : mtrain) CHECK(by_method.in_train(m.records[i].method_id));
}

TEST_CASE("save/load round-trips the plan") {
    const DatasetManifest m = manifest_with(7, 2);
    const SplitPlan plan = make_split(m, 123, 0.7);
    const auto path =
        (std::filesystem::temp_directory_path() / "sriqa_split_roundtrip.json").string();
    save_split(plan, path);
    const SplitPlan back = load_split(path);
    CHECK(back.seed == plan.seed);
    CHECK(back.ratio == plan.ratio);
    CHECK(back.train_ids == plan.train_ids);
    CHECK(back.test_ids == plan.test_ids);
    std::filesystem::remove(path);
}
