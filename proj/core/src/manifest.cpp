#include "sriqa/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "sriqa/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sriqa {

const char* to_string(LabelPolarity p) {
    return p == LabelPolarity::higher_is_better ? "higher_is_better" : "higher_is_worse";
}

LabelPolarity polarity_from_string(const std::string& s) {
    if (s == "higher_is_better") return LabelPolarity::higher_is_better;
    if (s == "higher_is_worse") return LabelPolarity::higher_is_worse;
    throw Error(ErrorKind::invalid_record, "unknown label polarity '" + s + "'");
}

void DatasetManifest::validate() {
    if (!(label_min < label_max))
        throw Error(ErrorKind::invalid_record, "label_range must be a nonempty interval");
    for (auto& rec : records) {
        rec.scale = derive_scale(rec.hr_width, rec.lr_width);
        if (rec.content_id.empty())
            throw Error(ErrorKind::invalid_record, "empty content_id for " + rec.sr_path);
        if (rec.method_id.empty())
            throw Error(ErrorKind::invalid_record, "empty method_id for " + rec.sr_path);
        if (!(rec.label >= label_min && rec.label <= label_max))
            throw Error(ErrorKind::invalid_record,
                        "label " + std::to_string(rec.label) + " outside declared range for " +
                            rec.sr_path);
    }
}

double DatasetManifest::normalized_label(const SampleRecord& rec) const {
    const double t = (rec.label - label_min) / (label_max - label_min);
    return polarity == LabelPolarity::higher_is_better ? t : 1.0 - t;
}

std::string DatasetManifest::resolve_path(const SampleRecord& rec) const {
    if (base_dir.empty()) return rec.sr_path;
    return (fs::path(base_dir) / rec.sr_path).string();
}

std::vector<std::string> DatasetManifest::content_ids() const {
    std::set<std::string> ids;
    for (const auto& rec : records) ids.insert(rec.content_id);
    return {ids.begin(), ids.end()};
}

void save_manifest(const DatasetManifest& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, "cannot write " + path);

    json header = {
        {"name", manifest.name},
        {"label_range", {manifest.label_min, manifest.label_max}},
        {"label_polarity", to_string(manifest.polarity)},
    };
    out << header.dump() << "\n";
    for (const auto& rec : manifest.records) {
        json line = {
            {"sr_path", rec.sr_path},
            {"lr_width", rec.lr_width},
            {"hr_width", rec.hr_width},
            {"label", rec.label},
            {"content_id", rec.content_id},
            {"method_id", rec.method_id},
        };
        out << line.dump() << "\n";
    }
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path);

    DatasetManifest manifest;
    manifest.base_dir = fs::path(path).parent_path().string();

    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::invalid_record, "empty manifest " + path);

    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.contains("label_range"))
        throw Error(ErrorKind::invalid_record, "bad manifest header in " + path);
    manifest.name = header.value("name", "");
    manifest.label_min = header["label_range"][0].get<double>();
    manifest.label_max = header["label_range"][1].get<double>();
    manifest.polarity = polarity_from_string(header.value("label_polarity", "higher_is_better"));

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error(ErrorKind::invalid_record,
                        "bad JSON at " + path + ":" + std::to_string(lineno));
        SampleRecord rec;
        rec.sr_path = j.at("sr_path").get<std::string>();
        rec.lr_width = j.at("lr_width").get<std::int64_t>();
        rec.hr_width = j.at("hr_width").get<std::int64_t>();
        rec.label = j.at("label").get<double>();
        rec.content_id = j.at("content_id").get<std::string>();
        rec.method_id = j.at("method_id").get<std::string>();
        manifest.records.push_back(std::move(rec));
    }
    manifest.validate();
    return manifest;
}

} // namespace sriqa
