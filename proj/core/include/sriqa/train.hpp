#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sriqa/checkpoint.hpp"
#include "sriqa/patches.hpp"
#include "sriqa/split.hpp"
#include "sriqa/stats.hpp"

namespace sriqa {

/// Mean absolute error between two equally-sized score vectors.
double mae_loss(const std::vector<double>& predictions, const std::vector<double>& targets);

/// One record's contribution to a training step: its scale, its normalized
/// label, and the patches cropped from it.
template <typename T>
struct RecordBatch {
    Rational scale;
    T label = T(0);
    std::vector<nn::Tensor3<T>> patches;
};

/// Forward + backward over one batch under the model's framework. Returns the
/// batch MAE; parameter gradients accumulate into `grad` (zero it first).
/// Each patch contributes sign(q - Q)/M to its score gradient, so records are
/// processed one at a time: per record the scale representation and (for sgh)
/// the generated head are built once, head gradients are pooled across the
/// record's patches, and the generator/embedder backward runs once.
template <typename T>
T step_forward_backward(const Model<T>& model, Model<T>& grad,
                        const std::vector<RecordBatch<T>>& batch,
                        std::vector<T>* patch_scores = nullptr) {
    std::size_t m = 0;
    for (const auto& rb : batch) m += rb.patches.size();
    if (m == 0) throw Error(ErrorKind::invalid_input, "training batch has no patches");
    const T inv_m = T(1) / static_cast<T>(m);

    T loss = T(0);
    for (const auto& rb : batch) {
        EmbedCache<T> ec;
        ScaleRep<T> s;
        if (model.framework != Framework::blind) s = embed_scale(rb.scale, model.embedder, &ec);

        HeadParams<T> gen_head, d_gen_head;
        if (model.framework == Framework::sgh) {
            gen_head = model.generator.generate(s);
            d_gen_head = HeadParams<T>::zeros(model.head_layout);
        }
        const HeadParams<T>& head =
            model.framework == Framework::sgh ? gen_head : model.head;
        nn::Vec<T> d_s_acc;
        if (model.framework == Framework::fusion) d_s_acc = nn::Vec<T>::Zero(kScaleDim);

        typename SmallCnnEncoder<T>::Cache cache;
        for (const auto& patch : rb.patches) {
            const nn::Tensor3<T> fmap = encode(patch, model.enc_config, model.encoder, &cache);
            const nn::Vec<T> v_raw = gap_flatten(fmap);
            T v_norm;
            const nn::Vec<T> v = clamp_feature_norm(v_raw, &v_norm);
            HeadCache<T> hc;
            T score;
            switch (model.framework) {
                case Framework::sgh: score = apply_head(v, head, model.head_layout, &hc); break;
                case Framework::fusion:
                    score = fusion_forward(v, s, head, model.head_layout, &hc);
                    break;
                case Framework::blind:
                default: score = blind_forward(v, head, model.head_layout, &hc); break;
            }
            if (patch_scores) patch_scores->push_back(score);

            const T diff = score - rb.label;
            loss += std::abs(diff) * inv_m;
            const T d_score = diff > T(0) ? inv_m : (diff < T(0) ? -inv_m : T(0));

            nn::Vec<T> dv_full;
            if (model.framework == Framework::sgh)
                apply_head_backward(d_score, head, hc, d_gen_head, &dv_full);
            else
                apply_head_backward(d_score, head, hc, grad.head, &dv_full);

            nn::Vec<T> dv;
            if (model.framework == Framework::fusion) {
                dv = dv_full.head(model.enc_config.feature_dim);
                d_s_acc += dv_full.tail(kScaleDim);
            } else {
                dv = std::move(dv_full);
            }
            dv = clamp_feature_norm_backward(dv, v_raw, v_norm);
            const nn::Tensor3<T> dmap = gap_flatten_backward(dv, fmap.h, fmap.w);
            model.encoder.backward(dmap, cache, grad.encoder);
        }

        if (model.framework == Framework::sgh) {
            nn::Vec<T> d_s = nn::Vec<T>::Zero(kScaleDim);
            model.generator.backward(d_gen_head, s, grad.generator, d_s);
            model.embedder.backward(d_s, ec, grad.embedder);
        } else if (model.framework == Framework::fusion) {
            model.embedder.backward(d_s_acc, ec, grad.embedder);
        }
    }
    return loss;
}

/// Runs the optimization protocol on the manifest's training side and returns
/// the final checkpoint. One epoch is ceil(|train records| / records_per_step)
/// steps; each step draws records_per_step records (with replacement) and
/// batch_patches/records_per_step random crops from each. Deterministic in
/// (manifest bytes, split, config). Per-step losses land in `step_losses` when
/// given.
Checkpoint train(const DatasetManifest& manifest, const SplitPlan& split,
                 const TrainConfig& config, std::vector<double>* step_losses = nullptr,
                 SplitMode mode = SplitMode::by_content);

struct EvalReport {
    std::uint64_t seed = 0;
    Framework framework = Framework::sgh;
    double srcc = 0;
    double plcc = 0;
    double krcc = 0;
    int n_test = 0;
    std::vector<double> per_image_scores; // test records, manifest order
    TrainConfig config;                   // resolved snapshot from the checkpoint

    std::string to_json() const;
    static EvalReport from_json(const std::string& text);
};

void save_report(const EvalReport& report, const std::string& path);
EvalReport load_report(const std::string& path);

/// Scores every test record (tiled patches, mean patch score) and correlates
/// the scores with normalized labels. spec.size must match the trained patch
/// size.
EvalReport evaluate(const DatasetManifest& manifest, const SplitPlan& split,
                    const Checkpoint& checkpoint, const PatchSpec& spec,
                    SplitMode mode = SplitMode::by_content);

struct TrialsReport {
    TrainConfig config; // seed field holds the first trial's seed
    double ratio = 0.8;
    std::vector<EvalReport> trials;
    double mean_srcc = 0;
    double mean_plcc = 0;
    double mean_krcc = 0;

    std::string to_json() const;
};

/// The repeated-splits protocol: for seed = 0..n_trials-1, split, train, and
/// evaluate; reports every trial plus the means.
TrialsReport run_trials(const DatasetManifest& manifest, TrainConfig config, int n_trials,
                        const PatchSpec& eval_spec, double ratio = 0.8);

void save_trials(const TrialsReport& report, const std::string& path);

} // namespace sriqa
