#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sriqa/nn.hpp"
#include "sriqa/rational.hpp"

namespace sriqa {

inline constexpr int kScaleDim = 128; // width of the scale representation S

/// Scale representation S: 128-dim embedding of the scale factor.
template <typename T>
using ScaleRep = nn::Vec<T>;

/// Quality head layout: five FC layers D -> 128 -> 64 -> 32 -> 16 -> 1,
/// sigmoid after the first four, identity on the last.
struct HeadLayout {
    int feature_dim = 128;

    static constexpr int kLayers = 5;

    std::array<int, kLayers + 1> dims() const {
        return {feature_dim, 128, 64, 32, 16, 1};
    }

    void validate() const {
        if (feature_dim < 1)
            throw Error(ErrorKind::invalid_config, "head feature_dim must be positive");
    }

    bool operator==(const HeadLayout&) const = default;
};

/// Per-layer head parameters; w[j] is dims[j] x dims[j+1], b[j] has dims[j+1].
/// Used both for generated heads (sgh) and fixed trainable heads (fusion/blind).
template <typename T>
struct HeadParams {
    nn::Mat<T> w[HeadLayout::kLayers];
    nn::Vec<T> b[HeadLayout::kLayers];

    static HeadParams zeros(const HeadLayout& layout) {
        layout.validate();
        const auto d = layout.dims();
        HeadParams p;
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            p.w[j] = nn::Mat<T>::Zero(d[j], d[j + 1]);
            p.b[j] = nn::Vec<T>::Zero(d[j + 1]);
        }
        return p;
    }

    bool matches(const HeadLayout& layout) const {
        const auto d = layout.dims();
        for (int j = 0; j < HeadLayout::kLayers; ++j)
            if (w[j].rows() != d[j] || w[j].cols() != d[j + 1] || b[j].size() != d[j + 1])
                return false;
        return true;
    }

    /// Small-variance init of a plain MLP head: w ~ N(0, 1/fan_in), b = 0.
    void init(const HeadLayout& layout, Rng& rng) {
        *this = zeros(layout);
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            const T std_dev = T(1) / std::sqrt(static_cast<T>(w[j].rows()));
            for (Eigen::Index r = 0; r < w[j].rows(); ++r)
                for (Eigen::Index c = 0; c < w[j].cols(); ++c)
                    w[j](r, c) = static_cast<T>(rng.next_normal()) * std_dev;
        }
    }

    void collect_params(std::vector<nn::ParamRef<T>>& out, const std::string& prefix) {
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            const std::string p = prefix + ".fc" + std::to_string(j + 1);
            nn::add_param(out, p + ".w", w[j]);
            nn::add_param(out, p + ".b", b[j]);
        }
    }

    /// All ten blocks flattened into one vector (weights then biases per layer);
    /// the similarity diagnostics operate on this.
    nn::Vec<T> flatten() const {
        Eigen::Index n = 0;
        for (int j = 0; j < HeadLayout::kLayers; ++j) n += w[j].size() + b[j].size();
        nn::Vec<T> out(n);
        Eigen::Index at = 0;
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            for (Eigen::Index r = 0; r < w[j].rows(); ++r)
                for (Eigen::Index c = 0; c < w[j].cols(); ++c) out[at++] = w[j](r, c);
            for (Eigen::Index i = 0; i < b[j].size(); ++i) out[at++] = b[j][i];
        }
        return out;
    }
};

template <typename T>
struct HeadCache {
    nn::Vec<T> x[HeadLayout::kLayers + 1]; // x[0] = V, x[5] = output
};

/// q = head(V): x_{j+1} = act_j(x_j w_j + b_j), identity on the last layer.
template <typename T>
T apply_head(const nn::Vec<T>& v, const HeadParams<T>& head, const HeadLayout& layout,
             HeadCache<T>* cache = nullptr) {
    layout.validate();
    if (v.size() != layout.feature_dim)
        throw Error(ErrorKind::invalid_input,
                    "head input length " + std::to_string(v.size()) + " != feature_dim " +
                        std::to_string(layout.feature_dim));
    if (!head.matches(layout))
        throw Error(ErrorKind::invalid_input, "head parameter shapes do not match layout");
    nn::Vec<T> x = v;
    if (cache) cache->x[0] = x;
    for (int j = 0; j < HeadLayout::kLayers; ++j) {
        nn::Vec<T> z = head.w[j].transpose() * x + head.b[j];
        if (j + 1 < HeadLayout::kLayers)
            for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = nn::sigmoid(z[i]);
        x = std::move(z);
        if (cache) cache->x[j + 1] = x;
    }
    return x[0];
}

/// Backpropagates d(score) through the head. Parameter gradients accumulate
/// into d_head; the gradient w.r.t. V is returned through d_v if non-null.
template <typename T>
void apply_head_backward(T d_score, const HeadParams<T>& head, const HeadCache<T>& cache,
                         HeadParams<T>& d_head, nn::Vec<T>* d_v = nullptr) {
    nn::Vec<T> dx(1);
    dx[0] = d_score;
    for (int j = HeadLayout::kLayers - 1; j >= 0; --j) {
        nn::Vec<T> dz = std::move(dx);
        if (j + 1 < HeadLayout::kLayers) { // undo the sigmoid
            const nn::Vec<T>& a = cache.x[j + 1];
            for (Eigen::Index i = 0; i < dz.size(); ++i) dz[i] *= a[i] * (T(1) - a[i]);
        }
        d_head.w[j].noalias() += cache.x[j] * dz.transpose();
        d_head.b[j] += dz;
        if (j > 0 || d_v) dx = head.w[j] * dz;
    }
    if (d_v) *d_v = std::move(dx);
}

template <typename T>
struct EmbedCache {
    T input = T(0);    // log2(scale)
    nn::Vec<T> pre;    // first layer pre-activation
    nn::Vec<T> hidden; // rectified
};

/// f_s: scale factor -> 128-dim representation S. Two FC layers with a
/// rectifier between them; the input is the scalar log2(scale).
template <typename T>
struct ScaleEmbedder {
    nn::Vec<T> w1, b1; // 1 -> 128
    nn::Mat<T> w2;     // 128 -> 128
    nn::Vec<T> b2;

    ScaleEmbedder()
        : w1(nn::Vec<T>::Zero(kScaleDim)),
          b1(nn::Vec<T>::Zero(kScaleDim)),
          w2(nn::Mat<T>::Zero(kScaleDim, kScaleDim)),
          b2(nn::Vec<T>::Zero(kScaleDim)) {}

    /// Unit-variance first layer with randomized biases so the rectifier
    /// hinges spread across the working range of log2(scale); the second
    /// layer keeps S near unit variance.
    void init(Rng& rng) {
        for (int i = 0; i < kScaleDim; ++i) {
            w1[i] = static_cast<T>(rng.next_normal());
            b1[i] = static_cast<T>(rng.next_normal());
        }
        const T std2 = T(1) / std::sqrt(static_cast<T>(kScaleDim));
        for (int r = 0; r < kScaleDim; ++r)
            for (int c = 0; c < kScaleDim; ++c)
                w2(r, c) = static_cast<T>(rng.next_normal()) * std2;
        b2.setZero();
    }

    void collect_params(std::vector<nn::ParamRef<T>>& out) {
        nn::add_param(out, "emb.fc1.w", w1);
        nn::add_param(out, "emb.fc1.b", b1);
        nn::add_param(out, "emb.fc2.w", w2);
        nn::add_param(out, "emb.fc2.b", b2);
    }

    ScaleRep<T> forward(T log2_scale, EmbedCache<T>* cache = nullptr) const {
        nn::Vec<T> pre = w1 * log2_scale + b1;
        nn::Vec<T> h = pre.cwiseMax(T(0));
        ScaleRep<T> s = w2 * h + b2;
        if (cache) {
            cache->input = log2_scale;
            cache->pre = std::move(pre);
            cache->hidden = std::move(h);
        }
        return s;
    }

    void backward(const nn::Vec<T>& d_s, const EmbedCache<T>& cache,
                  ScaleEmbedder<T>& grad) const {
        grad.w2.noalias() += d_s * cache.hidden.transpose();
        grad.b2 += d_s;
        nn::Vec<T> dh = w2.transpose() * d_s;
        for (int i = 0; i < kScaleDim; ++i)
            if (cache.pre[i] <= T(0)) dh[i] = T(0);
        grad.w1 += dh * cache.input;
        grad.b1 += dh;
    }
};

/// embed_scale: validates the scale factor and runs the embedder on
/// log2(scale). Scales below 1 are rejected.
template <typename T>
ScaleRep<T> embed_scale(const Rational& scale, const ScaleEmbedder<T>& params,
                        EmbedCache<T>* cache = nullptr) {
    if (scale.num < scale.den)
        throw Error(ErrorKind::invalid_scale,
                    "scale factor must be >= 1, got " + scale.str());
    return params.forward(static_cast<T>(scale.log2_value()), cache);
}

/// The hypernetwork: ten independent affine maps from S, one per generated
/// block. Weight blocks are emitted flat (row-major over the target matrix)
/// and divided by sqrt(fan_in) of their target layer after generation.
template <typename T>
struct HeadGenerator {
    HeadLayout layout;
    nn::Mat<T> gw[HeadLayout::kLayers]; // S -> flat w_j
    nn::Vec<T> gb[HeadLayout::kLayers];
    nn::Mat<T> bw[HeadLayout::kLayers]; // S -> b_j
    nn::Vec<T> bb[HeadLayout::kLayers];

    HeadGenerator() = default;

    explicit HeadGenerator(const HeadLayout& l) { configure(l); }

    /// Allocates zeroed generator blocks for the layout.
    void configure(const HeadLayout& l) {
        l.validate();
        layout = l;
        const auto d = layout.dims();
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            const Eigen::Index flat = Eigen::Index(d[j]) * d[j + 1];
            gw[j] = nn::Mat<T>::Zero(flat, kScaleDim);
            gb[j] = nn::Vec<T>::Zero(flat);
            bw[j] = nn::Mat<T>::Zero(d[j + 1], kScaleDim);
            bb[j] = nn::Vec<T>::Zero(d[j + 1]);
        }
    }

    /// Generator matrices get a small-variance init (gain 0.01 on top of
    /// 1/sqrt(|S|)); weight-map biases are drawn N(0,1) so the generated head
    /// starts out like HeadParams::init (w ~ N(0, 1/fan_in) after the
    /// sqrt(fan_in) division), and bias-map biases start at zero.
    void init(Rng& rng) {
        const T gen_std = T(0.01) / std::sqrt(static_cast<T>(kScaleDim));
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            for (Eigen::Index r = 0; r < gw[j].rows(); ++r)
                for (Eigen::Index c = 0; c < gw[j].cols(); ++c)
                    gw[j](r, c) = static_cast<T>(rng.next_normal()) * gen_std;
            for (Eigen::Index i = 0; i < gb[j].size(); ++i)
                gb[j][i] = static_cast<T>(rng.next_normal());
            for (Eigen::Index r = 0; r < bw[j].rows(); ++r)
                for (Eigen::Index c = 0; c < bw[j].cols(); ++c)
                    bw[j](r, c) = static_cast<T>(rng.next_normal()) * gen_std;
            bb[j].setZero();
        }
    }

    void collect_params(std::vector<nn::ParamRef<T>>& out) {
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            const std::string p = "gen.fc" + std::to_string(j + 1);
            nn::add_param(out, p + ".ww", gw[j]);
            nn::add_param(out, p + ".wb", gb[j]);
            nn::add_param(out, p + ".bw", bw[j]);
            nn::add_param(out, p + ".bb", bb[j]);
        }
    }

    HeadParams<T> generate(const ScaleRep<T>& s) const {
        if (s.size() != kScaleDim)
            throw Error(ErrorKind::invalid_config, "scale representation must have 128 entries");
        if (gw[0].rows() == 0)
            throw Error(ErrorKind::invalid_config, "generator not configured for a layout");
        const auto d = layout.dims();
        HeadParams<T> head;
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            nn::Vec<T> flat = gw[j] * s + gb[j];
            const T inv_sqrt_fan = T(1) / std::sqrt(static_cast<T>(d[j]));
            head.w[j].resize(d[j], d[j + 1]);
            for (int r = 0; r < d[j]; ++r)
                for (int c = 0; c < d[j + 1]; ++c)
                    head.w[j](r, c) = flat[Eigen::Index(r) * d[j + 1] + c] * inv_sqrt_fan;
            head.b[j] = bw[j] * s + bb[j];
        }
        return head;
    }

    /// Accumulates generator gradients from the head gradient and adds the
    /// chained contribution to d_s.
    void backward(const HeadParams<T>& d_head, const ScaleRep<T>& s, HeadGenerator<T>& grad,
                  nn::Vec<T>& d_s) const {
        const auto d = layout.dims();
        for (int j = 0; j < HeadLayout::kLayers; ++j) {
            const T inv_sqrt_fan = T(1) / std::sqrt(static_cast<T>(d[j]));
            nn::Vec<T> dflat(Eigen::Index(d[j]) * d[j + 1]);
            for (int r = 0; r < d[j]; ++r)
                for (int c = 0; c < d[j + 1]; ++c)
                    dflat[Eigen::Index(r) * d[j + 1] + c] = d_head.w[j](r, c) * inv_sqrt_fan;
            grad.gw[j].noalias() += dflat * s.transpose();
            grad.gb[j] += dflat;
            d_s.noalias() += gw[j].transpose() * dflat;
            grad.bw[j].noalias() += d_head.b[j] * s.transpose();
            grad.bb[j] += d_head.b[j];
            d_s.noalias() += bw[j].transpose() * d_head.b[j];
        }
    }
};

/// generate_params: shape-checks S against the generator and emits the head.
template <typename T>
HeadParams<T> generate_params(const ScaleRep<T>& s, const HeadLayout& layout,
                              const HeadGenerator<T>& params) {
    if (!(params.layout == layout))
        throw Error(ErrorKind::invalid_config, "generator was configured for a different layout");
    return params.generate(s);
}

} // namespace sriqa
