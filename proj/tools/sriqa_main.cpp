// sriqa: command-line front end for the SR quality-assessment toolkit.
// Subcommands wire the library into reproducible workflows; every artifact
// embeds the resolved configuration and tool version. Errors print as
// `error: <category>: <detail>` and exit nonzero.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sriqa/stats.hpp"
#include "sriqa/synth.hpp"
#include "sriqa/textures.hpp"
#include "sriqa/train.hpp"
#include "sriqa/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

sriqa::Rational parse_scale(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos)
            return sriqa::Rational{std::stoll(text), 1};
        return sriqa::Rational{std::stoll(text.substr(0, slash)),
                               std::stoll(text.substr(slash + 1))};
    } catch (const std::exception&) {
        throw sriqa::Error(sriqa::ErrorKind::invalid_scale,
                           "cannot parse scale '" + text + "' (use N or N/D)");
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw sriqa::Error(sriqa::ErrorKind::io, "cannot open '" + path + "' for writing");
    out << text;
    if (!out.flush()) throw sriqa::Error(sriqa::ErrorKind::io, "write failed for '" + path + "'");
}

// Options shared by train and trials.
struct TrainFlags {
    std::string manifest_path;
    std::string framework = "sgh";
    std::int64_t seed = 0;
    double lr = 1e-4;
    int epochs = 50;
    int batch_patches = 64;
    int records_per_step = 8;
    int patch_size = 224;
    double ratio = 0.8;

    void add_to(CLI::App* cmd, bool with_seed) {
        cmd->add_option("--manifest", manifest_path, "Dataset manifest (JSONL)")->required();
        cmd->add_option("--framework", framework, "Prediction framework")
            ->check(CLI::IsMember({"sgh", "fusion", "blind"}))
            ->capture_default_str();
        if (with_seed)
            cmd->add_option("--seed", seed, "Run seed (also the default split seed)")
                ->capture_default_str();
        cmd->add_option("--lr", lr, "Adam learning rate")->capture_default_str();
        cmd->add_option("--epochs", epochs, "Training epochs")->capture_default_str();
        cmd->add_option("--batch-patches", batch_patches, "Patches per optimizer step")
            ->capture_default_str();
        cmd->add_option("--records-per-step", records_per_step,
                        "Records each step's patches are drawn from")
            ->capture_default_str();
        cmd->add_option("--patch-size", patch_size, "Square crop side (multiple of 16)")
            ->capture_default_str();
        cmd->add_option("--ratio", ratio, "Train share of the content split")
            ->capture_default_str();
    }

    sriqa::TrainConfig to_config() const {
        sriqa::TrainConfig c;
        c.framework = sriqa::parse_framework(framework);
        c.seed = static_cast<std::uint64_t>(seed);
        c.learning_rate = lr;
        c.epochs = epochs;
        c.batch_patches = batch_patches;
        c.records_per_step = records_per_step;
        c.patch_size = patch_size;
        return c;
    }
};

void add_synth(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate the synthetic degradation benchmark");
    auto out_dir = std::make_shared<std::string>();
    auto scales = std::make_shared<std::vector<std::string>>(
        std::vector<std::string>{"2", "3", "9/2", "36/5"});
    auto seed = std::make_shared<std::int64_t>(0);
    auto sources = std::make_shared<std::vector<std::string>>();
    auto generate = std::make_shared<int>(24);
    auto source_size = std::make_shared<int>(288);
    auto name = std::make_shared<std::string>("synthetic");

    cmd->add_option("out_dir", *out_dir, "Output directory")->required();
    cmd->add_option("--scales", *scales,
                    "Scale factors > 1, as N or N/D; each must divide the source sides")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "Generator seed")->capture_default_str();
    cmd->add_option("--sources", *sources,
                    "Source PNGs (>=256px); omit to generate procedural textures")
        ->delimiter(',');
    cmd->add_option("--generate", *generate, "Procedural source count when --sources is unset")
        ->capture_default_str();
    cmd->add_option("--source-size", *source_size, "Procedural source side length")
        ->capture_default_str();
    cmd->add_option("--name", *name, "Manifest name")->capture_default_str();

    cmd->callback([=]() {
        sriqa::SynthConfig cfg;
        cfg.out_dir = *out_dir;
        for (const auto& s : *scales) cfg.scales.push_back(parse_scale(s));
        cfg.seed = static_cast<std::uint64_t>(*seed);
        cfg.name = *name;
        if (sources->empty()) {
            const fs::path src_dir = fs::path(*out_dir) / "sources";
            fs::create_directories(src_dir);
            const auto textures =
                sriqa::make_source_textures(*generate, *source_size, cfg.seed);
            char stem[32];
            for (std::size_t i = 0; i < textures.size(); ++i) {
                std::snprintf(stem, sizeof stem, "tex%03zu.png", i);
                const std::string p = (src_dir / stem).string();
                sriqa::write_png(p, textures[i]);
                cfg.source_paths.push_back(p);
            }
        } else {
            cfg.source_paths = *sources;
        }
        const sriqa::DatasetManifest manifest = sriqa::synth_benchmark(cfg);

        json prov{{"tool_version", sriqa::kVersion},
                  {"command", "synth"},
                  {"out_dir", *out_dir},
                  {"scales", *scales},
                  {"seed", *seed},
                  {"sources", cfg.source_paths},
                  {"name", *name}};
        write_text((fs::path(*out_dir) / "synth_config.json").string(), prov.dump(2) + "\n");
        std::cout << "wrote " << (fs::path(*out_dir) / "manifest.jsonl").string() << " ("
                  << manifest.records.size() << " records)\n";
    });
}

void add_train(CLI::App& app) {
    auto* cmd = app.add_subcommand("train", "Train one model and write a checkpoint");
    auto flags = std::make_shared<TrainFlags>();
    auto out = std::make_shared<std::string>();
    auto split_seed = std::make_shared<std::optional<std::int64_t>>();
    auto split_file = std::make_shared<std::string>();
    auto save_split_path = std::make_shared<std::string>();

    flags->add_to(cmd, true);
    cmd->add_option("--out", *out, "Checkpoint output path")->required();
    cmd->add_option("--split-seed", *split_seed, "Split seed (defaults to --seed)");
    cmd->add_option("--split-file", *split_file, "Use a saved split plan instead of deriving one");
    cmd->add_option("--save-split", *save_split_path, "Also write the split plan here");

    cmd->callback([=]() {
        const sriqa::DatasetManifest manifest = sriqa::load_manifest(flags->manifest_path);
        const sriqa::SplitPlan split =
            split_file->empty()
                ? sriqa::make_split(manifest, split_seed->value_or(flags->seed), flags->ratio)
                : sriqa::load_split(*split_file);
        if (!save_split_path->empty()) sriqa::save_split(split, *save_split_path);
        const sriqa::Checkpoint ck = sriqa::train(manifest, split, flags->to_config());
        ck.save(*out);
        std::cout << "wrote " << *out << " (framework " << flags->framework << ", "
                  << ck.blocks.size() << " parameter blocks)\n";
    });
}

void add_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Score a checkpoint on the test side of a split");
    auto manifest_path = std::make_shared<std::string>();
    auto ck_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto stride = std::make_shared<int>(64);
    auto ratio = std::make_shared<double>(0.8);
    auto split_seed = std::make_shared<std::optional<std::int64_t>>();
    auto split_file = std::make_shared<std::string>();

    cmd->add_option("--manifest", *manifest_path, "Dataset manifest (JSONL)")->required();
    cmd->add_option("--checkpoint", *ck_path, "Trained checkpoint")->required();
    cmd->add_option("--out", *out, "Eval report output path (JSON)")->required();
    cmd->add_option("--stride", *stride, "Evaluation tiling stride")->capture_default_str();
    cmd->add_option("--ratio", *ratio, "Train share of the content split")->capture_default_str();
    cmd->add_option("--split-seed", *split_seed,
                    "Split seed (defaults to the checkpoint's run seed)");
    cmd->add_option("--split-file", *split_file, "Use a saved split plan");

    cmd->callback([=]() {
        const sriqa::DatasetManifest manifest = sriqa::load_manifest(*manifest_path);
        const sriqa::Checkpoint ck = sriqa::Checkpoint::load(*ck_path);
        const sriqa::SplitPlan split =
            split_file->empty()
                ? sriqa::make_split(manifest,
                                    split_seed->value_or(static_cast<std::int64_t>(ck.config.seed)),
                                    *ratio)
                : sriqa::load_split(*split_file);
        sriqa::PatchSpec spec;
        spec.size = ck.config.patch_size;
        spec.stride = *stride;
        const sriqa::EvalReport rep = sriqa::evaluate(manifest, split, ck, spec);
        sriqa::save_report(rep, *out);
        std::cout << "srcc " << rep.srcc << "  plcc " << rep.plcc << "  krcc " << rep.krcc
                  << "  (n_test " << rep.n_test << ")\n";
    });
}

void add_trials(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "trials", "Repeated split/train/evaluate protocol; trial t uses seed t");
    auto flags = std::make_shared<TrainFlags>();
    auto out = std::make_shared<std::string>();
    auto n_trials = std::make_shared<int>(10);
    auto stride = std::make_shared<int>(64);

    flags->add_to(cmd, false);
    cmd->add_option("--out", *out, "Trials report output path (JSON)")->required();
    cmd->add_option("--trials", *n_trials, "Number of trials")->capture_default_str();
    cmd->add_option("--stride", *stride, "Evaluation tiling stride")->capture_default_str();

    cmd->callback([=]() {
        const sriqa::DatasetManifest manifest = sriqa::load_manifest(flags->manifest_path);
        sriqa::PatchSpec spec;
        spec.size = flags->patch_size;
        spec.stride = *stride;
        const sriqa::TrialsReport rep =
            sriqa::run_trials(manifest, flags->to_config(), *n_trials, spec, flags->ratio);
        sriqa::save_trials(rep, *out);
        std::cout << "srcc";
        for (const auto& t : rep.trials) std::cout << ' ' << t.srcc;
        std::cout << "  mean " << rep.mean_srcc << "\n";
    });
}

void add_stats(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "stats", "Scale-effect omnibus test (Alexander-Govern) over manifest labels");
    auto manifest_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("per-method-avg");
    auto alpha = std::make_shared<double>(0.05);

    cmd->add_option("--manifest", *manifest_path, "Dataset manifest (JSONL)")->required();
    cmd->add_option("--out", *out, "Stats output path (JSON)")->required();
    cmd->add_option("--mode", *mode, "Grouping mode")
        ->check(CLI::IsMember({"per-method-avg", "pooled"}))
        ->capture_default_str();
    cmd->add_option("--alpha", *alpha, "Significance level")->capture_default_str();

    cmd->callback([=]() {
        const sriqa::DatasetManifest manifest = sriqa::load_manifest(*manifest_path);
        json j{{"tool_version", sriqa::kVersion},
               {"dataset", manifest.name},
               {"mode", *mode},
               {"alpha", *alpha}};
        double statistic = 0, p_value = 0;
        int df = 0;
        if (*mode == "pooled") {
            const sriqa::AGResult r = sriqa::alexander_govern(sriqa::group_scores(manifest));
            statistic = r.statistic;
            p_value = r.p_value;
            df = r.df;
        } else {
            std::vector<std::string> methods;
            for (const auto& rec : manifest.records)
                if (std::find(methods.begin(), methods.end(), rec.method_id) == methods.end())
                    methods.push_back(rec.method_id);
            std::sort(methods.begin(), methods.end());
            json per = json::array();
            for (const auto& m : methods) {
                const sriqa::AGResult r =
                    sriqa::alexander_govern(sriqa::group_scores(manifest, m));
                per.push_back(json{{"method", m},
                                   {"statistic", r.statistic},
                                   {"p_value", r.p_value},
                                   {"df", r.df},
                                   {"significant", sriqa::significance_decision(r.p_value, *alpha)}});
                statistic += r.statistic;
                p_value += r.p_value;
                df = r.df;
            }
            statistic /= static_cast<double>(methods.size());
            p_value /= static_cast<double>(methods.size());
            j["per_method"] = per;
        }
        j["statistic"] = statistic;
        j["p_value"] = p_value;
        j["df"] = df;
        const bool sig = sriqa::significance_decision(p_value, *alpha);
        j["significant"] = sig;
        write_text(*out, j.dump(2) + "\n");
        std::cout << "statistic " << statistic << "  p " << p_value << "  "
                  << (sig ? "significant" : "not significant") << "\n";
    });
}

void add_violin(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "violin", "Per-scale label distributions for violin plots (JSON + CSV)");
    auto manifest_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();

    cmd->add_option("--manifest", *manifest_path, "Dataset manifest (JSONL)")->required();
    cmd->add_option("--out", *out, "Output base path; writes <out>.json and <out>.csv")
        ->required();

    cmd->callback([=]() {
        const sriqa::DatasetManifest manifest = sriqa::load_manifest(*manifest_path);
        const sriqa::ViolinData v = sriqa::violin_data(manifest);

        json groups = json::array();
        for (const auto& g : v.summaries)
            groups.push_back(json{{"scale", g.scale.str()},
                                  {"n", g.n},
                                  {"mean", g.mean},
                                  {"median", g.median},
                                  {"q1", g.q1},
                                  {"q3", g.q3},
                                  {"min", g.min},
                                  {"max", g.max}});
        json j{{"tool_version", sriqa::kVersion},
               {"dataset", manifest.name},
               {"label_polarity", sriqa::to_string(manifest.polarity)},
               {"label_range", {manifest.label_min, manifest.label_max}},
               {"groups", groups}};
        write_text(*out + ".json", j.dump(2) + "\n");

        std::string csv = "scale,label\n"; // one row per record, raw labels
        for (const auto& [scale, values] : v.groups)
            for (double value : values) csv += scale.str() + "," + std::to_string(value) + "\n";
        write_text(*out + ".csv", csv);
        std::cout << "wrote " << *out << ".json and " << *out << ".csv ("
                  << v.summaries.size() << " groups)\n";
    });
}

void add_weights(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "weights", "Cosine similarity of generated head weights across scales");
    auto ck_path = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto scale_args = std::make_shared<std::vector<std::string>>(
        std::vector<std::string>{"2", "3", "4", "8"});

    cmd->add_option("--checkpoint", *ck_path, "Trained sgh checkpoint")->required();
    cmd->add_option("--out", *out, "Output base path; writes <out>.json and <out>.csv")
        ->required();
    cmd->add_option("--scales", *scale_args, "Scales to compare (N or N/D)")
        ->delimiter(',')
        ->capture_default_str();

    cmd->callback([=]() {
        const sriqa::Checkpoint ck = sriqa::Checkpoint::load(*ck_path);
        std::vector<sriqa::Rational> scales;
        for (const auto& s : *scale_args) scales.push_back(parse_scale(s));
        const auto sims = sriqa::weight_similarity(ck, scales);

        json layers = json::array();
        std::string csv = "layer,scale_a,scale_b,cosine\n";
        for (std::size_t l = 0; l < sims.size(); ++l) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < sims[l].rows(); ++r) {
                json row = json::array();
                for (Eigen::Index c = 0; c < sims[l].cols(); ++c) {
                    row.push_back(sims[l](r, c));
                    csv += std::to_string(l + 1) + "," + scales[r].str() + "," +
                           scales[c].str() + "," + std::to_string(sims[l](r, c)) + "\n";
                }
                rows.push_back(row);
            }
            layers.push_back(rows);
        }
        json jscales = json::array();
        for (const auto& s : scales) jscales.push_back(s.str());
        json j{{"tool_version", sriqa::kVersion},
               {"config", json::parse(ck.config.to_json())},
               {"scales", jscales},
               {"layers", layers}};
        write_text(*out + ".json", j.dump(2) + "\n");
        write_text(*out + ".csv", csv);
        std::cout << "wrote " << *out << ".json and " << *out << ".csv\n";
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scale-guided SR image quality assessment toolkit"};
    app.set_version_flag("--version", sriqa::kVersion);
    app.set_config("--config", "", "Read options from a config file (TOML; [subcommand] sections)");
    app.require_subcommand(1);

    add_synth(app);
    add_train(app);
    add_eval(app);
    add_trials(app);
    add_stats(app);
    add_violin(app);
    add_weights(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const sriqa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: io: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
