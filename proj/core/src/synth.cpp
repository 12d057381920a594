#include "sriqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "sriqa/error.hpp"
#include "sriqa/image.hpp"

namespace fs = std::filesystem;

namespace sriqa {

namespace {

constexpr int kMinSourceSide = 256;

// centered so typical reconstruction PSNRs (roughly 18-40 dB) land on the
// responsive part of the curve
constexpr double kPsnrCenter = 26.0;
constexpr double kPsnrWidth = 5.0;

} // namespace

double squash_psnr(double psnr_db) {
    return 1.0 / (1.0 + std::exp(-(psnr_db - kPsnrCenter) / kPsnrWidth));
}

DatasetManifest synth_benchmark(const SynthConfig& cfg) {
    if (cfg.source_paths.empty())
        throw Error(ErrorKind::invalid_config, "no source images given");
    if (cfg.scales.empty())
        throw Error(ErrorKind::invalid_config, "no scales given");
    for (const Rational& s : cfg.scales)
        if (s.num <= s.den)
            throw Error(ErrorKind::invalid_config, "scale " + s.str() + " must be > 1");
    if (cfg.out_dir.empty())
        throw Error(ErrorKind::invalid_config, "out_dir is required");

    std::vector<Rational> scales = cfg.scales;
    std::sort(scales.begin(), scales.end(),
              [](const Rational& a, const Rational& b) { return a.value() < b.value(); });
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());

    std::set<std::string> seen_stems;
    for (const auto& path : cfg.source_paths) {
        const std::string stem = fs::path(path).stem().string();
        if (!seen_stems.insert(stem).second)
            throw Error(ErrorKind::invalid_config, "duplicate source stem '" + stem + "'");
    }

    fs::create_directories(fs::path(cfg.out_dir) / "recons");

    DatasetManifest manifest;
    manifest.name = cfg.name;
    manifest.label_min = 0.0;
    manifest.label_max = 1.0;
    manifest.polarity = LabelPolarity::higher_is_better;
    manifest.base_dir = cfg.out_dir;

    for (const auto& path : cfg.source_paths) {
        const ImageU8 source = read_png(path);
        if (source.width < kMinSourceSide || source.height < kMinSourceSide)
            throw Error(ErrorKind::invalid_config,
                        "source " + path + " smaller than " +
                            std::to_string(kMinSourceSide) + "px");

        const std::string stem = fs::path(path).stem().string();
        const ImageF source_f = to_float(source);

        for (const Rational& scale : scales) {
            if ((source.width * scale.den) % scale.num != 0 ||
                (source.height * scale.den) % scale.num != 0)
                throw Error(ErrorKind::invalid_config,
                            "scale " + scale.str() + " does not divide source " + path +
                                " (" + std::to_string(source.width) + "x" +
                                std::to_string(source.height) + ") evenly");
            const int lr_w = static_cast<int>(source.width * scale.den / scale.num);
            const int lr_h = static_cast<int>(source.height * scale.den / scale.num);
            const ImageF low = resize_area(source_f, lr_w, lr_h);
            const ImageF recon_f = resize_bilinear(low, source.width, source.height);
            const ImageU8 recon = to_u8(recon_f);

            std::string tag = scale.str();
            std::replace(tag.begin(), tag.end(), '/', '_');
            const std::string rel = "recons/" + stem + "_x" + tag + ".png";
            write_png((fs::path(cfg.out_dir) / rel).string(), recon);

            SampleRecord rec;
            rec.sr_path = rel;
            rec.lr_width = lr_w;
            rec.hr_width = source.width;
            rec.label = squash_psnr(psnr(source, recon));
            rec.content_id = stem;
            rec.method_id = "synthetic-bilinear";
            manifest.records.push_back(std::move(rec));
        }
    }

    manifest.validate();
    save_manifest(manifest, (fs::path(cfg.out_dir) / "manifest.jsonl").string());
    return manifest;
}

} // namespace sriqa
