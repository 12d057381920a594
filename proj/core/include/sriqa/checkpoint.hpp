#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "sriqa/frameworks.hpp"

namespace sriqa {

enum class Optimizer { adam };

inline const char* to_string(Optimizer o) {
    return o == Optimizer::adam ? "adam" : "?";
}

inline Optimizer parse_optimizer(const std::string& s) {
    if (s == "adam") return Optimizer::adam;
    throw Error(ErrorKind::invalid_config, "unknown optimizer '" + s + "'");
}

struct TrainConfig {
    Framework framework = Framework::sgh;
    std::uint64_t seed = 0;
    double learning_rate = 1e-4;
    int epochs = 50;
    int batch_patches = 64;   // patches per optimizer step
    int records_per_step = 8; // records those patches are drawn from
    int patch_size = 224;
    Optimizer optimizer = Optimizer::adam;

    void validate() const {
        if (learning_rate <= 0)
            throw Error(ErrorKind::invalid_config, "learning_rate must be positive");
        if (epochs < 1) throw Error(ErrorKind::invalid_config, "epochs must be >= 1");
        if (batch_patches < 1)
            throw Error(ErrorKind::invalid_config, "batch_patches must be >= 1");
        if (records_per_step < 1 || batch_patches % records_per_step != 0)
            throw Error(ErrorKind::invalid_config,
                        "batch_patches must be a positive multiple of records_per_step");
        if (patch_size < 16 || patch_size % 16 != 0)
            throw Error(ErrorKind::invalid_config,
                        "patch_size must be a positive multiple of 16");
    }

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

/// Trained state + the exact configuration that produced it. On disk this is
/// a one-line JSON header followed by raw little-endian float32 blocks, each
/// named and shape-tagged in the header. A checkpoint carries exactly the
/// parameter groups its framework uses.
struct Checkpoint {
    struct Block {
        std::string name;
        std::int64_t rows = 0;
        std::int64_t cols = 0;
        std::vector<float> data;
    };

    TrainConfig config;
    int epoch = 0;
    std::array<std::uint64_t, 4> rng_state{};
    std::vector<Block> blocks;

    const Block* find(const std::string& name) const {
        for (const Block& b : blocks)
            if (b.name == name) return &b;
        return nullptr;
    }

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

static_assert(std::endian::native == std::endian::little,
              "checkpoint block I/O assumes a little-endian host");

/// Snapshot a model's parameters into checkpoint blocks (stored as f32).
template <typename T>
Checkpoint snapshot(Model<T>& model, const TrainConfig& config, int epoch,
                    const std::array<std::uint64_t, 4>& rng_state) {
    Checkpoint ck;
    ck.config = config;
    ck.epoch = epoch;
    ck.rng_state = rng_state;
    for (const auto& p : model.params()) {
        Checkpoint::Block b;
        b.name = p.name;
        b.rows = p.rows;
        b.cols = p.cols;
        b.data.resize(static_cast<std::size_t>(p.rows) * p.cols);
        for (std::size_t i = 0; i < b.data.size(); ++i)
            b.data[i] = static_cast<float>(p.data[i]);
        ck.blocks.push_back(std::move(b));
    }
    return ck;
}

/// Rebuild a model from a checkpoint. The block inventory must match the
/// framework's parameter groups exactly, names and shapes included.
template <typename T>
Model<T> restore(const Checkpoint& ck) {
    EncoderConfig enc;
    enc.input_size = ck.config.patch_size;
    Model<T> model = Model<T>::make(ck.config.framework, enc);
    auto refs = model.params();
    if (refs.size() != ck.blocks.size())
        throw Error(ErrorKind::invalid_config,
                    "checkpoint holds " + std::to_string(ck.blocks.size()) +
                        " blocks, framework needs " + std::to_string(refs.size()));
    for (auto& p : refs) {
        const Checkpoint::Block* b = ck.find(p.name);
        if (!b)
            throw Error(ErrorKind::invalid_config,
                        "checkpoint is missing parameter block '" + p.name + "'");
        if (b->rows != p.rows || b->cols != p.cols)
            throw Error(ErrorKind::invalid_config,
                        "checkpoint block '" + p.name + "' has the wrong shape");
        for (std::size_t i = 0; i < b->data.size(); ++i)
            p.data[i] = static_cast<T>(b->data[i]);
    }
    return model;
}

} // namespace sriqa
