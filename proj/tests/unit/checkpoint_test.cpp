#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sriqa/checkpoint.hpp"
#include "sriqa/error.hpp"
#include "sriqa/rng.hpp"

using namespace sriqa;
namespace fs = std::filesystem;

namespace {

TrainConfig small_config(Framework fw) {
    TrainConfig cfg;
    cfg.framework = fw;
    cfg.seed = 3;
    cfg.learning_rate = 5e-4;
    cfg.epochs = 2;
    cfg.batch_patches = 8;
    cfg.records_per_step = 4;
    cfg.patch_size = 16;
    return cfg;
}

Checkpoint small_checkpoint(Framework fw) {
    EncoderConfig enc;
    enc.input_size = 16;
    Model<double> model = Model<double>::make(fw, enc);
    Rng rng(7);
    model.init(rng);
    return snapshot(model, small_config(fw), 2, {1u, 2u, 3u, 4u});
}

std::string temp_path(const char* leaf) {
    return (fs::temp_directory_path() / leaf).string();
}

bool has_block(const Checkpoint& ck, const std::string& prefix) {
    for (const auto& b : ck.blocks)
        if (b.name.rfind(prefix, 0) == 0) return true;
    return false;
}

} // namespace

TEST_CASE("train config survives its JSON form") {
    TrainConfig cfg = small_config(Framework::fusion);
    const TrainConfig back = TrainConfig::from_json(cfg.to_json());
    CHECK(back.framework == Framework::fusion);
    CHECK(back.seed == cfg.seed);
    CHECK(back.learning_rate == cfg.learning_rate);
    CHECK(back.epochs == cfg.epochs);
    CHECK(back.batch_patches == cfg.batch_patches);
    CHECK(back.records_per_step == cfg.records_per_step);
    CHECK(back.patch_size == cfg.patch_size);
    CHECK(back.optimizer == Optimizer::adam);

    CHECK_THROWS_AS(TrainConfig::from_json("not json"), Error);
    TrainConfig bad = cfg;
    bad.learning_rate = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.batch_patches = 6; // not a multiple of records_per_step=4
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = cfg;
    bad.patch_size = 40; // not a multiple of 16
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("each framework snapshots exactly its own parameter groups") {
    const Checkpoint sgh = small_checkpoint(Framework::sgh);
    CHECK(has_block(sgh, "enc."));
    CHECK(has_block(sgh, "emb."));
    CHECK(has_block(sgh, "gen."));
    CHECK_FALSE(has_block(sgh, "head."));
    CHECK(sgh.blocks.size() == 8 + 4 + 20);

    const Checkpoint fusion = small_checkpoint(Framework::fusion);
    CHECK(has_block(fusion, "emb."));
    CHECK(has_block(fusion, "head."));
    CHECK_FALSE(has_block(fusion, "gen."));
    CHECK(fusion.blocks.size() == 8 + 4 + 10);

    const Checkpoint blind = small_checkpoint(Framework::blind);
    CHECK(has_block(blind, "head."));
    CHECK_FALSE(has_block(blind, "emb."));
    CHECK(blind.blocks.size() == 8 + 10);

    // the fused head consumes [V || S], the blind head V alone
    CHECK(fusion.find("head.fc1.w")->rows == 128 + 128);
    CHECK(blind.find("head.fc1.w")->rows == 128);
}

TEST_CASE("save/load round-trips header, rng state, and raw blocks") {
    const Checkpoint ck = small_checkpoint(Framework::sgh);
    const std::string path = temp_path("sriqa_ckpt_roundtrip.bin");
    ck.save(path);
    const Checkpoint back = Checkpoint::load(path);

    CHECK(back.config.framework == Framework::sgh);
    CHECK(back.config.seed == ck.config.seed);
    CHECK(back.config.learning_rate == ck.config.learning_rate);
    CHECK(back.epoch == 2);
    CHECK(back.rng_state == ck.rng_state);
    REQUIRE(back.blocks.size() == ck.blocks.size());
    for (std::size_t i = 0; i < ck.blocks.size(); ++i) {
        CHECK(back.blocks[i].name == ck.blocks[i].name);
        CHECK(back.blocks[i].rows == ck.blocks[i].rows);
        CHECK(back.blocks[i].cols == ck.blocks[i].cols);
        CHECK(back.blocks[i].data == ck.blocks[i].data); // bitwise f32
    }
    fs::remove(path);
}

TEST_CASE("restore rebuilds the model from blocks and validates the inventory") {
    Checkpoint ck = small_checkpoint(Framework::blind);
    Model<double> model = restore<double>(ck);
    CHECK(model.framework == Framework::blind);
    auto refs = model.params();
    for (const auto& p : refs) {
        const Checkpoint::Block* b = ck.find(p.name);
        REQUIRE(b != nullptr);
        for (std::size_t i = 0; i < b->data.size(); ++i)
            CHECK(p.data[i] == static_cast<double>(b->data[i]));
    }

    Checkpoint missing = ck;
    missing.blocks.pop_back();
    CHECK_THROWS_AS(restore<double>(missing), Error);

    Checkpoint renamed = ck;
    renamed.blocks[0].name = "enc.conv9.w";
    CHECK_THROWS_AS(restore<double>(renamed), Error);

    Checkpoint reshaped = ck;
    reshaped.blocks[2].rows += 1;
    CHECK_THROWS_AS(restore<double>(reshaped), Error);
}

TEST_CASE("corrupt checkpoint files are rejected") {
    CHECK_THROWS_AS(Checkpoint::load("/nonexistent/sriqa/model.ckpt"), Error);

    const std::string path = temp_path("sriqa_ckpt_corrupt.bin");
    {
        std::ofstream out(path, std::ios::binary);
        out << "definitely not a checkpoint header\n";
    }
    CHECK_THROWS_AS(Checkpoint::load(path), Error);

    // valid header, truncated payload
    const Checkpoint ck = small_checkpoint(Framework::blind);
    ck.save(path);
    const auto full = fs::file_size(path);
    fs::resize_file(path, full - 64);
    CHECK_THROWS_AS(Checkpoint::load(path), Error);
    fs::remove(path);
}
