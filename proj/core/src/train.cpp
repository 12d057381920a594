#include "sriqa/train.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sriqa/version.hpp"

namespace sriqa {

using nlohmann::json;

double mae_loss(const std::vector<double>& predictions, const std::vector<double>& targets) {
    if (predictions.empty() || predictions.size() != targets.size())
        throw Error(ErrorKind::invalid_input,
                    "mae_loss needs two equally-sized nonempty vectors");
    double acc = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        acc += std::abs(predictions[i] - targets[i]);
    return acc / static_cast<double>(predictions.size());
}

namespace {

// Decoded images, loaded once per run keyed by record index.
class ImageCache {
public:
    explicit ImageCache(const DatasetManifest& manifest) : manifest_(manifest) {
        images_.resize(manifest.records.size());
        loaded_.assign(manifest.records.size(), false);
    }

    const ImageU8& get(std::size_t rec_idx) {
        if (!loaded_[rec_idx]) {
            const std::filesystem::path p =
                std::filesystem::path(manifest_.base_dir) / manifest_.records[rec_idx].sr_path;
            images_[rec_idx] = read_png(p.string());
            loaded_[rec_idx] = true;
        }
        return images_[rec_idx];
    }

private:
    const DatasetManifest& manifest_;
    std::vector<ImageU8> images_;
    std::vector<bool> loaded_;
};

EncoderConfig encoder_for(const TrainConfig& config) {
    EncoderConfig enc;
    enc.input_size = config.patch_size;
    return enc;
}

} // namespace

Checkpoint train(const DatasetManifest& manifest, const SplitPlan& split,
                 const TrainConfig& config, std::vector<double>* step_losses, SplitMode mode) {
    config.validate();
    const std::vector<std::size_t> train_recs = train_indices(manifest, split, mode);
    if (train_recs.empty())
        throw Error(ErrorKind::invalid_split, "split leaves no training records");

    Model<float> model = Model<float>::make(config.framework, encoder_for(config));
    Rng master(config.seed);
    Rng init_rng = master.stream(0x696e6974); // "init"
    Rng data_rng = master.stream(0x64617461); // "data"
    model.init(init_rng);

    auto params = model.params();
    Model<float> grad = model.zeros_like();
    auto grads = grad.params();
    nn::Adam<float>::Config adam_cfg;
    adam_cfg.lr = static_cast<float>(config.learning_rate);
    nn::Adam<float> adam(params, adam_cfg);

    PatchSpec crop_spec;
    crop_spec.size = config.patch_size;
    crop_spec.stride = config.patch_size;
    crop_spec.count = config.batch_patches / config.records_per_step;

    const std::size_t n_train = train_recs.size();
    const std::size_t steps_per_epoch =
        (n_train + config.records_per_step - 1) / config.records_per_step;
    ImageCache cache(manifest);
    const Normalization norm = model.norm;

    std::vector<RecordBatch<float>> batch(config.records_per_step);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t step = 0; step < steps_per_epoch; ++step) {
            for (int r = 0; r < config.records_per_step; ++r) {
                const std::size_t rec_idx =
                    train_recs[data_rng.next_below(static_cast<std::uint64_t>(n_train))];
                const SampleRecord& rec = manifest.records[rec_idx];
                RecordBatch<float>& rb = batch[r];
                rb.scale = rec.scale;
                rb.label = static_cast<float>(manifest.normalized_label(rec));
                rb.patches.clear();
                for (ImageU8& p : sample_training_patches(cache.get(rec_idx), crop_spec, data_rng))
                    rb.patches.push_back(patch_to_tensor<float>(p, norm));
            }
            nn::zero_params(grads);
            const float loss = step_forward_backward(model, grad, batch);
            adam.step(params, grads);
            if (step_losses) step_losses->push_back(static_cast<double>(loss));
        }
    }
    return snapshot(model, config, config.epochs, data_rng.state());
}

EvalReport evaluate(const DatasetManifest& manifest, const SplitPlan& split,
                    const Checkpoint& checkpoint, const PatchSpec& spec, SplitMode mode) {
    spec.validate();
    if (spec.size != checkpoint.config.patch_size)
        throw Error(ErrorKind::invalid_config,
                    "evaluation patch size " + std::to_string(spec.size) +
                        " does not match the trained size " +
                        std::to_string(checkpoint.config.patch_size));
    const std::vector<std::size_t> test_recs = test_indices(manifest, split, mode);
    if (test_recs.empty())
        throw Error(ErrorKind::invalid_split, "split leaves no test records");

    const Model<float> model = restore<float>(checkpoint);
    ImageCache cache(manifest);

    std::vector<double> scores, labels;
    scores.reserve(test_recs.size());
    labels.reserve(test_recs.size());
    for (std::size_t rec_idx : test_recs) {
        const SampleRecord& rec = manifest.records[rec_idx];
        double sum = 0;
        int n = 0;
        for (ImageU8& p : tile_eval_patches(cache.get(rec_idx), spec)) {
            sum += static_cast<double>(
                model.predict(patch_to_tensor<float>(p, model.norm), rec.scale));
            ++n;
        }
        scores.push_back(sum / n);
        labels.push_back(manifest.normalized_label(rec));
    }

    EvalReport rep;
    rep.seed = checkpoint.config.seed;
    rep.framework = checkpoint.config.framework;
    rep.config = checkpoint.config;
    rep.n_test = static_cast<int>(test_recs.size());
    rep.per_image_scores = scores;
    rep.srcc = srcc(scores, labels);
    rep.plcc = plcc(scores, labels);
    rep.krcc = krcc(scores, labels);
    return rep;
}

TrialsReport run_trials(const DatasetManifest& manifest, TrainConfig config, int n_trials,
                        const PatchSpec& eval_spec, double ratio) {
    if (n_trials < 1) throw Error(ErrorKind::invalid_config, "n_trials must be >= 1");
    TrialsReport out;
    out.ratio = ratio;
    for (int t = 0; t < n_trials; ++t) {
        config.seed = static_cast<std::uint64_t>(t);
        const SplitPlan split = make_split(manifest, t, ratio);
        const Checkpoint ck = train(manifest, split, config);
        out.trials.push_back(evaluate(manifest, split, ck, eval_spec));
    }
    out.config = out.trials.front().config;
    for (const EvalReport& r : out.trials) {
        out.mean_srcc += r.srcc;
        out.mean_plcc += r.plcc;
        out.mean_krcc += r.krcc;
    }
    out.mean_srcc /= n_trials;
    out.mean_plcc /= n_trials;
    out.mean_krcc /= n_trials;
    return out;
}

namespace {

json report_to_json_obj(const EvalReport& r) {
    return json{{"tool_version", kVersion},
                {"config", json::parse(r.config.to_json())},
                {"seed", r.seed},
                {"framework", to_string(r.framework)},
                {"srcc", r.srcc},
                {"plcc", r.plcc},
                {"krcc", r.krcc},
                {"n_test", r.n_test},
                {"per_image_scores", r.per_image_scores}};
}

EvalReport report_from_json_obj(const json& j) {
    EvalReport r;
    try {
        r.config = TrainConfig::from_json(j.at("config").dump());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.framework = parse_framework(j.at("framework").get<std::string>());
        r.srcc = j.at("srcc").get<double>();
        r.plcc = j.at("plcc").get<double>();
        r.krcc = j.at("krcc").get<double>();
        r.n_test = j.at("n_test").get<int>();
        r.per_image_scores = j.at("per_image_scores").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::io, std::string("malformed eval report: ") + e.what());
    }
    return r;
}

} // namespace

std::string EvalReport::to_json() const { return report_to_json_obj(*this).dump(2) + "\n"; }

EvalReport EvalReport::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorKind::io, "eval report is not valid JSON");
    return report_from_json_obj(j);
}

void save_report(const EvalReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << report.to_json();
    if (!out.flush()) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

EvalReport load_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return EvalReport::from_json(text);
}

std::string TrialsReport::to_json() const {
    json jt = json::array();
    json srccs = json::array(), plccs = json::array(), krccs = json::array();
    for (const EvalReport& r : trials) {
        jt.push_back(report_to_json_obj(r));
        srccs.push_back(r.srcc);
        plccs.push_back(r.plcc);
        krccs.push_back(r.krcc);
    }
    json j{{"tool_version", kVersion},
           {"config", json::parse(config.to_json())},
           {"ratio", ratio},
           {"n_trials", trials.size()},
           {"srcc_values", srccs},
           {"plcc_values", plccs},
           {"krcc_values", krccs},
           {"mean", {{"srcc", mean_srcc}, {"plcc", mean_plcc}, {"krcc", mean_krcc}}},
           {"trials", jt}};
    return j.dump(2) + "\n";
}

void save_trials(const TrialsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << report.to_json();
    if (!out.flush()) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

} // namespace sriqa
