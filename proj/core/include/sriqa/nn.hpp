#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sriqa/error.hpp"
#include "sriqa/rng.hpp"

namespace sriqa::nn {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

/// Dense CHW tensor.
template <typename T>
struct Tensor3 {
    int c = 0, h = 0, w = 0;
    std::vector<T> v;

    Tensor3() = default;
    Tensor3(int c_, int h_, int w_)
        : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, T(0)) {}

    T& at(int ch, int y, int x) {
        return v[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
    T at(int ch, int y, int x) const {
        return v[(static_cast<std::size_t>(ch) * h + y) * w + x];
    }
    std::size_t size() const { return v.size(); }
    bool same_shape(const Tensor3& o) const { return c == o.c && h == o.h && w == o.w; }
};

/// A named view over one parameter block; models hand these out in a fixed
/// order so the optimizer, the checkpoint writer, and the gradient checker
/// all walk the same sequence.
template <typename T>
struct ParamRef {
    std::string name;
    T* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
};

template <typename T>
void add_param(std::vector<ParamRef<T>>& out, const std::string& name, Mat<T>& m) {
    out.push_back({name, m.data(), static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols())});
}

template <typename T>
void add_param(std::vector<ParamRef<T>>& out, const std::string& name, Vec<T>& v) {
    out.push_back({name, v.data(), static_cast<std::size_t>(v.size()), 1});
}

template <typename T>
void zero_params(const std::vector<ParamRef<T>>& params) {
    for (const auto& p : params)
        std::fill(p.data, p.data + p.size(), T(0));
}

// ---------------------------------------------------------------------------
// elementwise ops

template <typename T>
void relu_inplace(Tensor3<T>& t) {
    for (auto& x : t.v) x = x > T(0) ? x : T(0);
}

/// dX = dY masked by the sign of the pre-activation.
template <typename T>
void relu_backward(const Tensor3<T>& pre_act, Tensor3<T>& grad) {
    for (std::size_t i = 0; i < grad.v.size(); ++i)
        if (pre_act.v[i] <= T(0)) grad.v[i] = T(0);
}

template <typename T>
T sigmoid(T x) {
    return T(1) / (T(1) + std::exp(-x));
}

/// Normalizes each channel to zero mean and unit variance over its spatial
/// positions (in place). Keeps activation statistics anchored across depth,
/// which a from-scratch CNN without learned normalization otherwise loses
/// as training drifts the weights. inv_std receives 1/sqrt(var + eps).
template <typename T>
void instance_norm(Tensor3<T>& t, Vec<T>& inv_std) {
    const int n = t.h * t.w;
    const T inv_n = T(1) / static_cast<T>(n);
    inv_std.resize(t.c);
    for (int c = 0; c < t.c; ++c) {
        T* p = t.v.data() + static_cast<std::size_t>(c) * n;
        T mean = T(0);
        for (int i = 0; i < n; ++i) mean += p[i];
        mean *= inv_n;
        T var = T(0);
        for (int i = 0; i < n; ++i) {
            p[i] -= mean;
            var += p[i] * p[i];
        }
        var *= inv_n;
        const T is = T(1) / std::sqrt(var + T(1e-5));
        inv_std[c] = is;
        for (int i = 0; i < n; ++i) p[i] *= is;
    }
}

/// d(input) given d(normalized) and the forward's normalized output.
template <typename T>
Tensor3<T> instance_norm_backward(const Tensor3<T>& d_norm, const Tensor3<T>& normed,
                                  const Vec<T>& inv_std) {
    const int n = d_norm.h * d_norm.w;
    const T inv_n = T(1) / static_cast<T>(n);
    Tensor3<T> dx(d_norm.c, d_norm.h, d_norm.w);
    for (int c = 0; c < d_norm.c; ++c) {
        const std::size_t off = static_cast<std::size_t>(c) * n;
        const T* dn = d_norm.v.data() + off;
        const T* xh = normed.v.data() + off;
        T* out = dx.v.data() + off;
        T sum_dn = T(0), sum_dnxh = T(0);
        for (int i = 0; i < n; ++i) {
            sum_dn += dn[i];
            sum_dnxh += dn[i] * xh[i];
        }
        sum_dn *= inv_n;
        sum_dnxh *= inv_n;
        for (int i = 0; i < n; ++i) out[i] = inv_std[c] * (dn[i] - sum_dn - xh[i] * sum_dnxh);
    }
    return dx;
}

// ---------------------------------------------------------------------------
// 3x3 convolution, stride 1, zero padding 1 (spatial size preserved)

template <typename T>
Mat<T> im2col3x3(const Tensor3<T>& x) {
    const int k = x.c * 9;
    const int n = x.h * x.w;
    Mat<T> cols(k, n);
    for (int ch = 0; ch < x.c; ++ch) {
        for (int ky = -1; ky <= 1; ++ky) {
            for (int kx = -1; kx <= 1; ++kx) {
                const int row = (ch * 3 + (ky + 1)) * 3 + (kx + 1);
                for (int y = 0; y < x.h; ++y) {
                    const int sy = y + ky;
                    for (int xx = 0; xx < x.w; ++xx) {
                        const int sx = xx + kx;
                        const bool inside = sy >= 0 && sy < x.h && sx >= 0 && sx < x.w;
                        cols(row, y * x.w + xx) = inside ? x.at(ch, sy, sx) : T(0);
                    }
                }
            }
        }
    }
    return cols;
}

template <typename T>
Tensor3<T> col2im3x3(const Mat<T>& cols, int c, int h, int w) {
    Tensor3<T> x(c, h, w);
    for (int ch = 0; ch < c; ++ch) {
        for (int ky = -1; ky <= 1; ++ky) {
            for (int kx = -1; kx <= 1; ++kx) {
                const int row = (ch * 3 + (ky + 1)) * 3 + (kx + 1);
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky;
                    if (sy < 0 || sy >= h) continue;
                    for (int xx = 0; xx < w; ++xx) {
                        const int sx = xx + kx;
                        if (sx < 0 || sx >= w) continue;
                        x.at(ch, sy, sx) += cols(row, y * w + xx);
                    }
                }
            }
        }
    }
    return x;
}

template <typename T>
struct Conv3x3 {
    Mat<T> weight; // (out_channels × in_channels*9)
    Vec<T> bias;   // (out_channels)

    Conv3x3() = default;
    Conv3x3(int in_ch, int out_ch) : weight(Mat<T>::Zero(out_ch, in_ch * 9)),
                                     bias(Vec<T>::Zero(out_ch)) {}

    int in_channels() const { return static_cast<int>(weight.cols()) / 9; }
    int out_channels() const { return static_cast<int>(weight.rows()); }

    void init_he(Rng& rng) {
        const double std_dev = std::sqrt(2.0 / static_cast<double>(weight.cols()));
        for (Eigen::Index j = 0; j < weight.cols(); ++j)
            for (Eigen::Index i = 0; i < weight.rows(); ++i)
                weight(i, j) = static_cast<T>(rng.next_normal() * std_dev);
        bias.setZero();
    }

    /// Returns the pre-activation map; cols is kept by the caller for backward.
    Tensor3<T> forward(const Tensor3<T>& x, Mat<T>& cols) const {
        if (x.c != in_channels())
            throw Error(ErrorKind::invalid_input, "conv channel mismatch");
        cols = im2col3x3(x);
        Mat<T> y = weight * cols;
        y.colwise() += bias;
        Tensor3<T> out(out_channels(), x.h, x.w);
        Eigen::Map<Mat<T>>(out.v.data(), out.c, x.h * x.w) = y;
        return out;
    }

    /// Accumulates into grad; writes input gradient into dx when non-null.
    void backward(const Tensor3<T>& dy, const Mat<T>& cols, Conv3x3<T>& grad,
                  Tensor3<T>* dx, int in_h, int in_w) const {
        Eigen::Map<const Mat<T>> dy_m(dy.v.data(), dy.c, dy.h * dy.w);
        grad.weight.noalias() += dy_m * cols.transpose();
        grad.bias.noalias() += dy_m.rowwise().sum();
        if (dx) {
            Mat<T> dcols = weight.transpose() * dy_m;
            *dx = col2im3x3(dcols, in_channels(), in_h, in_w);
        }
    }
};

// ---------------------------------------------------------------------------
// 2x2 average pooling, stride 2 (requires even spatial dims)

template <typename T>
Tensor3<T> avgpool2(const Tensor3<T>& x) {
    if (x.h % 2 != 0 || x.w % 2 != 0)
        throw Error(ErrorKind::invalid_input, "avgpool2 requires even spatial dims");
    Tensor3<T> y(x.c, x.h / 2, x.w / 2);
    for (int c = 0; c < x.c; ++c)
        for (int oy = 0; oy < y.h; ++oy)
            for (int ox = 0; ox < y.w; ++ox)
                y.at(c, oy, ox) = (x.at(c, 2 * oy, 2 * ox) + x.at(c, 2 * oy, 2 * ox + 1) +
                                   x.at(c, 2 * oy + 1, 2 * ox) + x.at(c, 2 * oy + 1, 2 * ox + 1)) *
                                  T(0.25);
    return y;
}

template <typename T>
Tensor3<T> avgpool2_backward(const Tensor3<T>& dy, int in_h, int in_w) {
    Tensor3<T> dx(dy.c, in_h, in_w);
    for (int c = 0; c < dy.c; ++c)
        for (int oy = 0; oy < dy.h; ++oy)
            for (int ox = 0; ox < dy.w; ++ox) {
                const T g = dy.at(c, oy, ox) * T(0.25);
                dx.at(c, 2 * oy, 2 * ox) = g;
                dx.at(c, 2 * oy, 2 * ox + 1) = g;
                dx.at(c, 2 * oy + 1, 2 * ox) = g;
                dx.at(c, 2 * oy + 1, 2 * ox + 1) = g;
            }
    return dx;
}

// ---------------------------------------------------------------------------
// Adam with bias correction; state is keyed by position in the param list,
// which is fixed per model type.

template <typename T>
class Adam {
public:
    struct Config {
        T lr = T(1e-4);
        T beta1 = T(0.9);
        T beta2 = T(0.999);
        T eps = T(1e-8);
    };

    Adam(const std::vector<ParamRef<T>>& params, Config cfg) : cfg_(cfg) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const auto& p : params) {
            m_.emplace_back(p.size(), T(0));
            v_.emplace_back(p.size(), T(0));
        }
    }

    void step(const std::vector<ParamRef<T>>& params, const std::vector<ParamRef<T>>& grads) {
        if (params.size() != grads.size() || params.size() != m_.size())
            throw Error(ErrorKind::invalid_input, "optimizer/model param list mismatch");
        ++t_;
        const T bc1 = T(1) - std::pow(cfg_.beta1, static_cast<T>(t_));
        const T bc2 = T(1) - std::pow(cfg_.beta2, static_cast<T>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            T* p = params[i].data;
            const T* g = grads[i].data;
            T* m = m_[i].data();
            T* v = v_[i].data();
            const std::size_t n = params[i].size();
            for (std::size_t k = 0; k < n; ++k) {
                m[k] = cfg_.beta1 * m[k] + (T(1) - cfg_.beta1) * g[k];
                v[k] = cfg_.beta2 * v[k] + (T(1) - cfg_.beta2) * g[k] * g[k];
                const T mhat = m[k] / bc1;
                const T vhat = v[k] / bc2;
                p[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            }
        }
    }

    long steps() const { return t_; }

private:
    Config cfg_;
    long t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

} // namespace sriqa::nn
