#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "sriqa/error.hpp"
#include "sriqa/synth.hpp"
#include "sriqa/textures.hpp"
#include "sriqa/train.hpp"

using namespace sriqa;
namespace fs = std::filesystem;

namespace {

// A 4-source benchmark shared by the tests below, built once per run.
const DatasetManifest& tiny_benchmark() {
    static const DatasetManifest manifest = [] {
        const fs::path dir = fs::temp_directory_path() / "sriqa_train_test_bench";
        fs::remove_all(dir);
        fs::create_directories(dir / "src");
        SynthConfig cfg;
        const auto textures = make_source_textures(4, 256, 17);
        for (std::size_t i = 0; i < textures.size(); ++i) {
            const auto p = dir / "src" / ("tex" + std::to_string(i) + ".png");
            write_png(p.string(), textures[i]);
            cfg.source_paths.push_back(p.string());
        }
        cfg.scales = {Rational(2, 1), Rational(4, 1)};
        cfg.out_dir = (dir / "bench").string();
        return synth_benchmark(cfg);
    }();
    return manifest;
}

TrainConfig tiny_config(Framework fw) {
    TrainConfig cfg;
    cfg.framework = fw;
    cfg.seed = 0;
    cfg.learning_rate = 1e-3;
    cfg.epochs = 8;
    cfg.batch_patches = 8;
    cfg.records_per_step = 4;
    cfg.patch_size = 16;
    return cfg;
}

template <typename T>
std::vector<RecordBatch<T>> toy_batch(int seed) {
    Rng rng(static_cast<std::uint64_t>(seed));
    std::vector<RecordBatch<T>> batch(2);
    batch[0].scale = Rational(2, 1);
    batch[0].label = T(0.75);
    batch[1].scale = Rational(4, 1);
    batch[1].label = T(0.3);
    for (auto& rb : batch)
        for (int p = 0; p < 2; ++p) {
            nn::Tensor3<T> t(3, 16, 16);
            for (int i = 0; i < t.size(); ++i)
                t.v[i] = static_cast<T>(rng.next_double() * 2.0 - 1.0);
            rb.patches.push_back(std::move(t));
        }
    return batch;
}

double mean_of(const std::vector<double>& v, std::size_t from, std::size_t to) {
    return std::accumulate(v.begin() + from, v.begin() + to, 0.0) / static_cast<double>(to - from);
}

} // namespace

TEST_CASE("mae_loss averages absolute errors and rejects ragged input") {
    CHECK(mae_loss({0.5, 0.2}, {0.1, 0.4}) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(mae_loss({1.0}, {1.0}) == 0.0);
    CHECK_THROWS_AS(mae_loss({0.1}, {0.1, 0.2}), Error);
    CHECK_THROWS_AS(mae_loss({}, {}), Error);
}

TEST_CASE("the training step reports the loss its own patch scores imply") {
    for (Framework fw : {Framework::sgh, Framework::fusion, Framework::blind}) {
        EncoderConfig enc;
        enc.input_size = 16;
        Model<double> model = Model<double>::make(fw, enc);
        Rng rng(21);
        model.init(rng);
        Model<double> grad = model.zeros_like();

        const auto batch = toy_batch<double>(5);
        std::vector<double> scores;
        const double loss = step_forward_backward(model, grad, batch, &scores);

        REQUIRE(scores.size() == 4);
        double expect = 0.0;
        std::size_t k = 0;
        for (const auto& rb : batch)
            for (std::size_t p = 0; p < rb.patches.size(); ++p)
                expect += std::abs(scores[k++] - static_cast<double>(rb.label)) / 4.0;
        CHECK(loss == doctest::Approx(expect).epsilon(1e-14));

        // the inference path must agree with the training-forward scores
        k = 0;
        for (const auto& rb : batch)
            for (const auto& patch : rb.patches)
                CHECK(model.predict(patch, rb.scale) ==
                      doctest::Approx(scores[k++]).epsilon(1e-12));
    }
}

TEST_CASE("gradients accumulate additively across steps") {
    EncoderConfig enc;
    enc.input_size = 16;
    Model<double> model = Model<double>::make(Framework::sgh, enc);
    Rng rng(22);
    model.init(rng);

    const auto batch = toy_batch<double>(6);
    Model<double> grad = model.zeros_like();
    step_forward_backward(model, grad, batch);
    Model<double> twice = model.zeros_like();
    step_forward_backward(model, twice, batch);
    step_forward_backward(model, twice, batch);

    auto g1 = grad.params();
    auto g2 = twice.params();
    REQUIRE(g1.size() == g2.size());
    // not bitwise: the second pass folds its terms into a nonzero accumulator
    for (std::size_t b = 0; b < g1.size(); ++b)
        for (std::int64_t i = 0; i < g1[b].rows * g1[b].cols; ++i)
            CHECK(g2[b].data[i] == doctest::Approx(2.0 * g1[b].data[i]).epsilon(1e-12));

    std::vector<RecordBatch<double>> empty;
    CHECK_THROWS_AS(step_forward_backward(model, grad, empty), Error);
}

TEST_CASE("train runs the full protocol deterministically and the loss comes down") {
    const DatasetManifest& m = tiny_benchmark();
    const SplitPlan split = make_split(m, 1, 0.5); // 2 train / 2 test contents

    TrainConfig cfg = tiny_config(Framework::sgh);
    cfg.epochs = 30;
    std::vector<double> losses;
    const Checkpoint ck = train(m, split, cfg, &losses);

    // 4 train records / 4 records_per_step = 1 step per epoch
    CHECK(losses.size() == 30);
    CHECK(ck.epoch == 30);
    CHECK(ck.config.framework == Framework::sgh);
    CHECK(mean_of(losses, 25, 30) < mean_of(losses, 0, 5));

    std::vector<double> losses2;
    const Checkpoint again = train(m, split, cfg, &losses2);
    CHECK(losses2 == losses); // bitwise reproducible
    REQUIRE(again.blocks.size() == ck.blocks.size());
    for (std::size_t i = 0; i < ck.blocks.size(); ++i)
        CHECK(again.blocks[i].data == ck.blocks[i].data);

    SplitPlan hollow;
    hollow.train_ids = {"no-such-content"};
    hollow.test_ids = {"also-missing"};
    CHECK_THROWS_AS(train(m, hollow, cfg), Error); // no training records on that side
}

TEST_CASE("evaluate scores every test record and guards the patch size") {
    const DatasetManifest& m = tiny_benchmark();
    const SplitPlan split = make_split(m, 1, 0.5);
    const Checkpoint ck = train(m, split, tiny_config(Framework::fusion));

    PatchSpec spec;
    spec.size = 16;
    spec.stride = 120;
    const EvalReport rep = evaluate(m, split, ck, spec);
    CHECK(rep.framework == Framework::fusion);
    CHECK(rep.n_test == 4); // 2 held-out contents x 2 scales
    REQUIRE(rep.per_image_scores.size() == 4);
    for (double s : rep.per_image_scores) CHECK(std::isfinite(s));
    CHECK(rep.srcc == doctest::Approx(rep.srcc)); // not NaN
    CHECK(std::abs(rep.srcc) <= 1.0);
    CHECK(std::abs(rep.krcc) <= 1.0);

    PatchSpec wrong = spec;
    wrong.size = 32;
    CHECK_THROWS_AS(evaluate(m, split, ck, wrong), Error);
}

TEST_CASE("eval reports survive their JSON form") {
    EvalReport rep;
    rep.seed = 9;
    rep.framework = Framework::fusion;
    rep.srcc = 0.8125;
    rep.plcc = -0.25;
    rep.krcc = 0.5;
    rep.n_test = 3;
    rep.per_image_scores = {0.1, 0.7071067811865476, 0.9};
    rep.config = tiny_config(Framework::fusion);

    const EvalReport back = EvalReport::from_json(rep.to_json());
    CHECK(back.seed == 9);
    CHECK(back.framework == Framework::fusion);
    CHECK(back.srcc == rep.srcc);
    CHECK(back.plcc == rep.plcc);
    CHECK(back.krcc == rep.krcc);
    CHECK(back.n_test == 3);
    CHECK(back.per_image_scores == rep.per_image_scores);
    CHECK(back.config.patch_size == 16);

    CHECK_THROWS_AS(EvalReport::from_json("{}"), Error);
}

TEST_CASE("run_trials reseeds per trial and averages the metrics") {
    const DatasetManifest& m = tiny_benchmark();
    TrainConfig cfg = tiny_config(Framework::blind);
    cfg.epochs = 2;

    PatchSpec spec;
    spec.size = 16;
    spec.stride = 120;
    const TrialsReport rep = run_trials(m, cfg, 2, spec, 0.5);
    REQUIRE(rep.trials.size() == 2);
    CHECK(rep.trials[0].seed == 0);
    CHECK(rep.trials[1].seed == 1);
    CHECK(rep.mean_srcc ==
          doctest::Approx((rep.trials[0].srcc + rep.trials[1].srcc) / 2).epsilon(1e-15));
    CHECK(rep.mean_krcc ==
          doctest::Approx((rep.trials[0].krcc + rep.trials[1].krcc) / 2).epsilon(1e-15));
}
