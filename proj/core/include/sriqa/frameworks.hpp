#pragma once

#include <string>
#include <vector>

#include "sriqa/encoder.hpp"
#include "sriqa/hypernet.hpp"

namespace sriqa {

enum class Framework { sgh, fusion, blind };

inline const char* to_string(Framework f) {
    switch (f) {
        case Framework::sgh: return "sgh";
        case Framework::fusion: return "fusion";
        case Framework::blind: return "blind";
    }
    return "?";
}

inline Framework parse_framework(const std::string& s) {
    if (s == "sgh") return Framework::sgh;
    if (s == "fusion") return Framework::fusion;
    if (s == "blind") return Framework::blind;
    throw Error(ErrorKind::invalid_config, "unknown framework '" + s + "'");
}

/// Fusion ablation: concatenate [V || S] and run a fixed head whose first
/// layer takes D+128 inputs; activations and later dims match HeadLayout.
template <typename T>
T fusion_forward(const nn::Vec<T>& v, const ScaleRep<T>& s, const HeadParams<T>& head,
                 const HeadLayout& layout, HeadCache<T>* cache = nullptr) {
    if (s.size() != kScaleDim)
        throw Error(ErrorKind::invalid_input, "scale representation must have 128 entries");
    if (v.size() + s.size() != layout.feature_dim)
        throw Error(ErrorKind::invalid_input,
                    "fusion head expects " + std::to_string(layout.feature_dim) +
                        " inputs, got " + std::to_string(v.size() + s.size()));
    nn::Vec<T> cat(v.size() + s.size());
    cat << v, s;
    return apply_head(cat, head, layout, cache);
}

/// Scale-blind baseline: fixed head on V alone; scale never enters.
template <typename T>
T blind_forward(const nn::Vec<T>& v, const HeadParams<T>& head, const HeadLayout& layout,
                HeadCache<T>* cache = nullptr) {
    return apply_head(v, head, layout, cache);
}

/// One trainable model instance. Which components exist depends on the
/// framework:
///   sgh    — encoder + embedder + generator (head is generated per scale)
///   fusion — encoder + embedder + fixed head on [V || S]
///   blind  — encoder + fixed head on V
template <typename T>
struct Model {
    Framework framework = Framework::sgh;
    EncoderConfig enc_config;
    Normalization norm;
    HeadLayout head_layout;   // feature_dim = D (sgh/blind) or D+128 (fusion)
    SmallCnnEncoder<T> encoder;
    ScaleEmbedder<T> embedder;
    HeadGenerator<T> generator;
    HeadParams<T> head;

    static Model make(Framework fw, const EncoderConfig& enc) {
        enc.validate();
        Model m;
        m.framework = fw;
        m.enc_config = enc;
        m.head_layout.feature_dim =
            fw == Framework::fusion ? enc.feature_dim + kScaleDim : enc.feature_dim;
        if (fw == Framework::sgh)
            m.generator.configure(m.head_layout);
        else
            m.head = HeadParams<T>::zeros(m.head_layout);
        return m;
    }

    void init(Rng& rng) {
        encoder.init(rng);
        switch (framework) {
            case Framework::sgh:
                embedder.init(rng);
                generator.init(rng);
                break;
            case Framework::fusion:
                embedder.init(rng);
                head.init(head_layout, rng);
                break;
            case Framework::blind:
                head.init(head_layout, rng);
                break;
        }
    }

    /// Trainable parameters, in a fixed order shared with the gradient model
    /// and the optimizer state.
    std::vector<nn::ParamRef<T>> params() {
        std::vector<nn::ParamRef<T>> out;
        encoder.collect_params(out);
        if (framework != Framework::blind) embedder.collect_params(out);
        if (framework == Framework::sgh)
            generator.collect_params(out);
        else
            head.collect_params(out, "head");
        return out;
    }

    /// A same-shape model with all parameters zeroed, for gradient accumulation.
    Model zeros_like() const {
        Model g = *this;
        auto refs = g.params();
        nn::zero_params(refs);
        return g;
    }

    nn::Vec<T> features(const nn::Tensor3<T>& patch,
                        typename SmallCnnEncoder<T>::Cache* cache = nullptr) const {
        return clamp_feature_norm(gap_flatten(encode(patch, enc_config, encoder, cache)));
    }

    /// Inference-path score for one patch. Blind models ignore the scale.
    T predict(const nn::Tensor3<T>& patch, const Rational& scale) const {
        const nn::Vec<T> v = features(patch);
        switch (framework) {
            case Framework::sgh: {
                const ScaleRep<T> s = embed_scale(scale, embedder);
                return apply_head(v, generate_params(s, head_layout, generator), head_layout);
            }
            case Framework::fusion: {
                const ScaleRep<T> s = embed_scale(scale, embedder);
                return fusion_forward(v, s, head, head_layout);
            }
            case Framework::blind:
                return blind_forward(v, head, head_layout);
        }
        throw Error(ErrorKind::invalid_config, "unreachable framework");
    }
};

} // namespace sriqa
