#include <doctest.h>

#include "sriqa/encoder.hpp"

using namespace sriqa;

TEST_CASE("patch_to_tensor applies the channel normalization") {
    ImageU8 img(2, 1);
    img.at(0, 0, 0) = 0;
    img.at(0, 0, 1) = 128;
    img.at(0, 0, 2) = 255;
    img.at(1, 0, 0) = 255;
    Normalization norm; // mean 0.5, std 0.5
    auto t = patch_to_tensor<double>(img, norm);
    CHECK(t.at(0, 0, 0) == doctest::Approx(-1.0));            // 0 -> (0-0.5)/0.5
    CHECK(t.at(1, 0, 0) == doctest::Approx(128.0 / 255 * 2 - 1));
    CHECK(t.at(2, 0, 0) == doctest::Approx(1.0));             // 255 -> +1
    CHECK(t.at(0, 0, 1) == doctest::Approx(1.0));
}

TEST_CASE("gap_flatten equals the per-channel mean") {
    nn::Tensor3<double> f(2, 2, 3);
    double v = 0;
    for (auto& x : f.v) x = v += 1; // 1..12
    auto g = gap_flatten(f);
    REQUIRE(g.size() == 2);
    CHECK(g[0] == doctest::Approx((1 + 2 + 3 + 4 + 5 + 6) / 6.0));
    CHECK(g[1] == doctest::Approx((7 + 8 + 9 + 10 + 11 + 12) / 6.0));

    nn::Tensor3<double> empty;
    CHECK_THROWS_AS((void)gap_flatten(empty), Error);
}

TEST_CASE("builtin encoder maps S x S to 128 x S/16 x S/16") {
    EncoderConfig cfg;
    cfg.input_size = 32;
    SmallCnnEncoder<double> enc;
    Rng rng(5);
    enc.init(rng);
    nn::Tensor3<double> patch(3, 32, 32);
    for (auto& v : patch.v) v = rng.next_double() - 0.5;
    auto f = encode(patch, cfg, enc);
    CHECK(f.c == 128);
    CHECK(f.h == 2);
    CHECK(f.w == 2);

    // shape mismatches are rejected
    nn::Tensor3<double> wrong(3, 48, 48);
    CHECK_THROWS_AS((void)encode(wrong, cfg, enc), Error);
}

TEST_CASE("encoder config validation") {
    EncoderConfig cfg;
    cfg.input_size = 33; // not a multiple of 16
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.input_size = 224;
    CHECK_NOTHROW(cfg.validate());
    cfg.feature_dim = 64; // builtin always emits 128
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("external encoder enforces the declared feature_dim") {
    EncoderConfig cfg;
    cfg.kind = EncoderConfig::Kind::external;
    cfg.feature_dim = 8;
    cfg.input_size = 16;
    ExternalEncoder<double> good(cfg, [](const nn::Tensor3<double>&) {
        return nn::Tensor3<double>(8, 1, 1);
    });
    nn::Tensor3<double> patch(3, 16, 16);
    CHECK(good.encode(patch).c == 8);

    ExternalEncoder<double> bad(cfg, [](const nn::Tensor3<double>&) {
        return nn::Tensor3<double>(9, 1, 1);
    });
    CHECK_THROWS_AS((void)bad.encode(patch), Error);
}

TEST_CASE("feature norm clamp: identity below the cap, unit RMS above it") {
    Rng rng(99);
    nn::Vec<double> small(16), big(16);
    for (int i = 0; i < 16; ++i) {
        small[i] = rng.next_normal() * 0.1;
        big[i] = rng.next_normal() * 40.0;
    }
    double n = 0;
    nn::Vec<double> s = clamp_feature_norm(small, &n);
    CHECK(n == doctest::Approx(small.norm()));
    CHECK((s - small).norm() == 0.0);

    nn::Vec<double> b = clamp_feature_norm(big, &n);
    CHECK(b.norm() == doctest::Approx(4.0)); // sqrt(16) * RMS 1
    // direction preserved
    CHECK(b.normalized().dot(big.normalized()) == doctest::Approx(1.0));
}

TEST_CASE("feature norm clamp backward matches finite differences when clipping") {
    Rng rng(100);
    nn::Vec<double> v(12), up(12);
    for (int i = 0; i < 12; ++i) {
        v[i] = rng.next_normal() * 25.0; // far above the cap
        up[i] = rng.next_normal();
    }
    double n = 0;
    (void)clamp_feature_norm(v, &n);
    nn::Vec<double> dv = clamp_feature_norm_backward(up, v, n);

    const double h = 1e-6;
    for (int i = 0; i < 12; ++i) {
        nn::Vec<double> vp = v, vm = v;
        vp[i] += h;
        vm[i] -= h;
        const double fp = up.dot(clamp_feature_norm(vp));
        const double fm = up.dot(clamp_feature_norm(vm));
        CHECK(dv[i] == doctest::Approx((fp - fm) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("instance norm: per-channel moments and conv-bias absorption") {
    Rng rng(4242);
    nn::Tensor3<double> t(3, 6, 6);
    for (auto& v : t.v) v = rng.next_normal() * 3.0 + 1.5;
    nn::Tensor3<double> shifted = t;
    for (int y = 0; y < 6; ++y)
        for (int x = 0; x < 6; ++x) shifted.at(1, y, x) += 7.0; // channel-constant offset

    nn::Vec<double> is, is2;
    nn::instance_norm(t, is);
    nn::instance_norm(shifted, is2);
    for (int c = 0; c < 3; ++c) {
        double m = 0, v2 = 0;
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x) m += t.at(c, y, x);
        m /= 36;
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x) v2 += (t.at(c, y, x) - m) * (t.at(c, y, x) - m);
        CHECK(std::abs(m) < 1e-12);
        CHECK(v2 / 36 == doctest::Approx(1.0).epsilon(1e-4)); // eps in the denominator
    }
    // a per-channel constant shift (what a conv bias adds) must vanish
    for (std::size_t i = 0; i < t.v.size(); ++i)
        CHECK(t.v[i] == doctest::Approx(shifted.v[i]).epsilon(1e-9));
}
