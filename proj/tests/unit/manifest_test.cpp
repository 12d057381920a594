#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sriqa/error.hpp"
#include "sriqa/manifest.hpp"

using namespace sriqa;

namespace {

DatasetManifest sample_manifest() {
    DatasetManifest m;
    m.name = "toy";
    m.label_min = 1.0;
    m.label_max = 5.0;
    m.polarity = LabelPolarity::higher_is_better;
    m.records = {
        {"a_x2.png", 144, 288, {}, 4.2, "a", "bicubic"},
        {"a_x4.png", 72, 288, {}, 2.1, "a", "bicubic"},
        {"b_x3.png", 96, 288, {}, 3.0, "b", "gan"},
    };
    return m;
}

std::filesystem::path temp_manifest_path(const char* leaf) {
    return std::filesystem::temp_directory_path() / leaf;
}

} // namespace

TEST_CASE("validate derives each record's scale from its widths") {
    DatasetManifest m = sample_manifest();
    m.validate();
    CHECK(m.records[0].scale == Rational(2, 1));
    CHECK(m.records[1].scale == Rational(4, 1));
    CHECK(m.records[2].scale == Rational(3, 1));
}

TEST_CASE("validate rejects malformed records") {
    DatasetManifest m = sample_manifest();
    m.records[1].label = 7.0; // outside [1,5]
    CHECK_THROWS_AS(m.validate(), Error);

    m = sample_manifest();
    m.records[0].content_id.clear();
    CHECK_THROWS_AS(m.validate(), Error);

    m = sample_manifest();
    m.records[2].lr_width = 400; // wider than hr
    CHECK_THROWS_AS(m.validate(), Error);

    m = sample_manifest();
    m.label_max = m.label_min;
    CHECK_THROWS_AS(m.validate(), Error);
}

TEST_CASE("normalized_label is min-max scaled and flips for rank-style labels") {
    DatasetManifest m = sample_manifest();
    CHECK(m.normalized_label(m.records[0]) == doctest::Approx(3.2 / 4.0));
    CHECK(m.normalized_label(m.records[1]) == doctest::Approx(1.1 / 4.0));

    m.polarity = LabelPolarity::higher_is_worse;
    CHECK(m.normalized_label(m.records[0]) == doctest::Approx(1.0 - 3.2 / 4.0));
}

TEST_CASE("content_ids are sorted and unique") {
    DatasetManifest m = sample_manifest();
    CHECK(m.content_ids() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("save/load round-trips through JSONL and anchors paths at the manifest") {
    const auto path = temp_manifest_path("sriqa_manifest_roundtrip.jsonl");
    DatasetManifest m = sample_manifest();
    m.polarity = LabelPolarity::higher_is_worse;
    save_manifest(m, path.string());

    const DatasetManifest back = load_manifest(path.string());
    CHECK(back.name == "toy");
    CHECK(back.label_min == 1.0);
    CHECK(back.label_max == 5.0);
    CHECK(back.polarity == LabelPolarity::higher_is_worse);
    REQUIRE(back.records.size() == 3);
    CHECK(back.records[1].sr_path == "a_x4.png");
    CHECK(back.records[1].label == 2.1);
    CHECK(back.records[1].scale == Rational(4, 1)); // re-derived on load
    CHECK(back.records[2].method_id == "gan");
    CHECK(back.base_dir == path.parent_path().string());
    CHECK(back.resolve_path(back.records[0]) == (path.parent_path() / "a_x2.png").string());
    std::filesystem::remove(path);
}

TEST_CASE("load rejects missing files, bad headers, and bad records") {
    CHECK_THROWS_AS(load_manifest("/nonexistent/sriqa/manifest.jsonl"), Error);

    const auto path = temp_manifest_path("sriqa_manifest_bad.jsonl");
    {
        std::ofstream out(path);
        out << "{\"name\": \"x\"}\n"; // header without label_range
    }
    CHECK_THROWS_AS(load_manifest(path.string()), Error);

    {
        std::ofstream out(path);
        out << "{\"name\":\"x\",\"label_range\":[0,1],\"label_polarity\":\"higher_is_better\"}\n";
        out << "not json\n";
    }
    CHECK_THROWS_AS(load_manifest(path.string()), Error);
    std::filesystem::remove(path);
}
