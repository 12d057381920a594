#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "sriqa/image.hpp"
#include "sriqa/nn.hpp"

namespace sriqa {

struct EncoderConfig {
    enum class Kind { builtin_small_cnn, external };

    Kind kind = Kind::builtin_small_cnn;
    int feature_dim = 128; // channel count of the final feature map
    int input_size = 224;  // pixels; must match the patch size

    void validate() const {
        if (input_size <= 0 || feature_dim <= 0)
            throw Error(ErrorKind::invalid_config, "encoder dims must be positive");
        if (kind == Kind::builtin_small_cnn) {
            if (feature_dim != 128)
                throw Error(ErrorKind::invalid_config,
                            "builtin encoder always produces 128 channels");
            if (input_size % 16 != 0)
                throw Error(ErrorKind::invalid_config,
                            "builtin encoder needs input_size divisible by 16");
        }
    }
};

/// Per-channel input normalization applied to patches before encoding.
struct Normalization {
    double mean = 0.5;
    double std_dev = 0.5;
};

/// Decoded patch -> normalized CHW tensor.
template <typename T>
nn::Tensor3<T> patch_to_tensor(const ImageU8& patch, const Normalization& norm) {
    nn::Tensor3<T> t(3, patch.height, patch.width);
    const T inv = T(1.0 / (255.0 * norm.std_dev));
    const T off = T(norm.mean / norm.std_dev);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < patch.height; ++y)
            for (int x = 0; x < patch.width; ++x)
                t.at(c, y, x) = static_cast<T>(patch.at(x, y, c)) * inv - off;
    return t;
}

/// Global average pooling followed by flattening: one value per channel.
template <typename T>
nn::Vec<T> gap_flatten(const nn::Tensor3<T>& feature_map) {
    if (feature_map.c < 1 || feature_map.h < 1 || feature_map.w < 1)
        throw Error(ErrorKind::invalid_input, "gap_flatten needs a nonempty feature map");
    nn::Vec<T> out(feature_map.c);
    const T inv = T(1) / static_cast<T>(feature_map.h * feature_map.w);
    for (int c = 0; c < feature_map.c; ++c) {
        T acc = T(0);
        for (int y = 0; y < feature_map.h; ++y)
            for (int x = 0; x < feature_map.w; ++x) acc += feature_map.at(c, y, x);
        out[c] = acc * inv;
    }
    return out;
}

template <typename T>
nn::Tensor3<T> gap_flatten_backward(const nn::Vec<T>& dv, int h, int w) {
    nn::Tensor3<T> df(static_cast<int>(dv.size()), h, w);
    const T inv = T(1) / static_cast<T>(h * w);
    for (int c = 0; c < df.c; ++c) {
        const T g = dv[c] * inv;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) df.at(c, y, x) = g;
    }
    return df;
}

/// Caps the feature vector at unit RMS. A safety net behind the encoder's
/// instance norm: unbounded features push the sigmoid head into saturation
/// and cut the gradient path back to the convolutions. Identity below the
/// cap, pure rescale above it.
template <typename T>
nn::Vec<T> clamp_feature_norm(const nn::Vec<T>& v, T* norm_out = nullptr) {
    const T limit = std::sqrt(static_cast<T>(v.size()));
    const T n = v.norm();
    if (norm_out) *norm_out = n;
    if (n <= limit) return v;
    return v * (limit / n);
}

template <typename T>
nn::Vec<T> clamp_feature_norm_backward(const nn::Vec<T>& d_out, const nn::Vec<T>& v, T norm) {
    const T limit = std::sqrt(static_cast<T>(v.size()));
    if (norm <= limit) return d_out;
    const T g = limit / norm;
    return g * (d_out - v * (v.dot(d_out) / (norm * norm)));
}

/// Four conv blocks (3x3, channels 3->16->32->64->128), each conv followed by
/// a rectifier and a stride-2 average pool. A multiple-of-16 input side S
/// gives a 128 x S/16 x S/16 feature map.
template <typename T>
struct SmallCnnEncoder {
    static constexpr int kChannels[5] = {3, 16, 32, 64, 128};
    static constexpr int kBlocks = 4;

    nn::Conv3x3<T> conv[kBlocks];

    SmallCnnEncoder() {
        for (int i = 0; i < kBlocks; ++i)
            conv[i] = nn::Conv3x3<T>(kChannels[i], kChannels[i + 1]);
    }

    void init(Rng& rng) {
        for (int i = 0; i < kBlocks; ++i) conv[i].init_he(rng);
    }

    void collect_params(std::vector<nn::ParamRef<T>>& out) {
        for (int i = 0; i < kBlocks; ++i) {
            const std::string p = "enc.conv" + std::to_string(i + 1);
            nn::add_param(out, p + ".w", conv[i].weight);
            nn::add_param(out, p + ".b", conv[i].bias);
        }
    }

    struct Cache {
        nn::Mat<T> cols[kBlocks];       // im2col of each conv input
        nn::Tensor3<T> normed[kBlocks]; // instance-normalized pre-activations
        nn::Vec<T> inv_std[kBlocks];
        int in_h[kBlocks], in_w[kBlocks];
    };

    nn::Tensor3<T> forward(const nn::Tensor3<T>& patch, Cache* cache = nullptr) const {
        if (patch.c != 3)
            throw Error(ErrorKind::invalid_input, "encoder expects a 3-channel patch");
        if (patch.h % 16 != 0 || patch.w % 16 != 0)
            throw Error(ErrorKind::invalid_input,
                        "encoder input dims must be divisible by 16");
        nn::Tensor3<T> x = patch;
        nn::Mat<T> scratch;
        nn::Vec<T> is_scratch;
        for (int i = 0; i < kBlocks; ++i) {
            nn::Mat<T>& cols = cache ? cache->cols[i] : scratch;
            if (cache) {
                cache->in_h[i] = x.h;
                cache->in_w[i] = x.w;
            }
            nn::Tensor3<T> a = conv[i].forward(x, cols);
            nn::instance_norm(a, cache ? cache->inv_std[i] : is_scratch);
            if (cache) cache->normed[i] = a;
            nn::relu_inplace(a);
            x = nn::avgpool2(a);
        }
        return x;
    }

    /// Accumulates parameter gradients; optionally returns the input gradient.
    void backward(const nn::Tensor3<T>& d_out, const Cache& cache, SmallCnnEncoder<T>& grad,
                  nn::Tensor3<T>* d_patch = nullptr) const {
        nn::Tensor3<T> dy = d_out;
        for (int i = kBlocks - 1; i >= 0; --i) {
            nn::Tensor3<T> da = nn::avgpool2_backward(dy, cache.in_h[i], cache.in_w[i]);
            nn::relu_backward(cache.normed[i], da);
            da = nn::instance_norm_backward(da, cache.normed[i], cache.inv_std[i]);
            nn::Tensor3<T> dx;
            const bool need_dx = i > 0 || d_patch != nullptr;
            conv[i].backward(da, cache.cols[i], grad.conv[i], need_dx ? &dx : nullptr,
                             cache.in_h[i], cache.in_w[i]);
            dy = std::move(dx);
        }
        if (d_patch) *d_patch = std::move(dy);
    }
};

/// Builtin path of the content-perception stage: validates the patch shape
/// against the config and runs the small CNN.
template <typename T>
nn::Tensor3<T> encode(const nn::Tensor3<T>& patch, const EncoderConfig& config,
                      const SmallCnnEncoder<T>& params,
                      typename SmallCnnEncoder<T>::Cache* cache = nullptr) {
    config.validate();
    if (patch.c != 3 || patch.h != config.input_size || patch.w != config.input_size)
        throw Error(ErrorKind::invalid_input,
                    "patch shape does not match encoder input_size " +
                        std::to_string(config.input_size));
    return params.forward(patch, cache);
}

/// Adapter for plugging an external backbone: any callable that maps a patch
/// to a 3-D feature map with config.feature_dim channels. Inference only.
template <typename T>
class ExternalEncoder {
public:
    using Fn = std::function<nn::Tensor3<T>(const nn::Tensor3<T>&)>;

    ExternalEncoder(EncoderConfig config, Fn fn) : config_(config), fn_(std::move(fn)) {
        if (config_.kind != EncoderConfig::Kind::external)
            throw Error(ErrorKind::invalid_config, "ExternalEncoder requires kind=external");
    }

    nn::Tensor3<T> encode(const nn::Tensor3<T>& patch) const {
        if (patch.c != 3 || patch.h != config_.input_size || patch.w != config_.input_size)
            throw Error(ErrorKind::invalid_input, "patch shape mismatch for external encoder");
        nn::Tensor3<T> f = fn_(patch);
        if (f.c != config_.feature_dim)
            throw Error(ErrorKind::invalid_input,
                        "external encoder returned " + std::to_string(f.c) +
                            " channels, config says " + std::to_string(config_.feature_dim));
        return f;
    }

    const EncoderConfig& config() const { return config_; }

private:
    EncoderConfig config_;
    Fn fn_;
};

} // namespace sriqa
