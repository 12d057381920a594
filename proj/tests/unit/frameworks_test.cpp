#include <doctest.h>

#include "sriqa/frameworks.hpp"

using namespace sriqa;

namespace {

Model<double> make_toy(Framework fw, std::uint64_t seed) {
    EncoderConfig enc;
    enc.input_size = 16;
    auto m = Model<double>::make(fw, enc);
    Rng rng(seed);
    m.init(rng);
    return m;
}

nn::Tensor3<double> random_patch(Rng& rng) {
    nn::Tensor3<double> t(3, 16, 16);
    for (auto& v : t.v) v = rng.next_double() * 2 - 1;
    return t;
}

} // namespace

TEST_CASE("fusion_forward constant propagation and determinism") {
    HeadLayout layout;
    layout.feature_dim = 128 + kScaleDim;
    auto head = HeadParams<double>::zeros(layout);
    head.b[4][0] = 0.3;
    nn::Vec<double> v = nn::Vec<double>::Random(128);
    ScaleRep<double> s = ScaleRep<double>::Random(kScaleDim);
    CHECK(fusion_forward(v, s, head, layout) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(fusion_forward(v, s, head, layout) == fusion_forward(v, s, head, layout));

    nn::Vec<double> tiny = nn::Vec<double>::Random(4);
    CHECK_THROWS_AS((void)fusion_forward(tiny, s, head, layout), Error);
}

TEST_CASE("blind_forward ignores everything but V") {
    HeadLayout layout;
    layout.feature_dim = 128;
    auto head = HeadParams<double>::zeros(layout);
    nn::Vec<double> v = nn::Vec<double>::Random(128);
    CHECK(blind_forward(v, head, layout) == 0.0); // zero head -> score 0

    auto blind = make_toy(Framework::blind, 21);
    Rng rng(33);
    auto patch = random_patch(rng);
    // identical patch at different declared scales scores identically
    CHECK(blind.predict(patch, Rational{2, 1}) == blind.predict(patch, Rational{8, 1}));
}

TEST_CASE("predict equals the composition of the stage ops bit-for-bit") {
    auto m = make_toy(Framework::sgh, 7);
    Rng rng(8);
    auto patch = random_patch(rng);
    const Rational scale{3, 1};
    const double fused = m.predict(patch, scale);
    const auto v = gap_flatten(encode(patch, m.enc_config, m.encoder));
    const auto s = embed_scale(scale, m.embedder);
    const auto head = generate_params(s, m.head_layout, m.generator);
    CHECK(fused == apply_head(v, head, m.head_layout));
}

TEST_CASE("frameworks own distinct parameter groups") {
    auto sgh = make_toy(Framework::sgh, 1);
    auto fusion = make_toy(Framework::fusion, 1);
    auto blind = make_toy(Framework::blind, 1);

    auto names = [](Model<double>& m) {
        std::vector<std::string> out;
        for (auto& p : m.params()) out.push_back(p.name);
        return out;
    };
    auto has_prefix = [](const std::vector<std::string>& ns, const std::string& p) {
        for (const auto& n : ns)
            if (n.rfind(p, 0) == 0) return true;
        return false;
    };

    auto sn = names(sgh), fn = names(fusion), bn = names(blind);
    CHECK(has_prefix(sn, "gen."));
    CHECK(has_prefix(sn, "emb."));
    CHECK(!has_prefix(sn, "head."));
    CHECK(has_prefix(fn, "head."));
    CHECK(has_prefix(fn, "emb."));
    CHECK(!has_prefix(fn, "gen."));
    CHECK(has_prefix(bn, "head."));
    CHECK(!has_prefix(bn, "emb."));
    CHECK(!has_prefix(bn, "gen."));

    // fusion's fixed head takes the concatenated input
    CHECK(fusion.head.w[0].rows() == 128 + kScaleDim);
    CHECK(blind.head.w[0].rows() == 128);
}
