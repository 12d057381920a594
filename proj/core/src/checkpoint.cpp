#include "sriqa/checkpoint.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sriqa/version.hpp"

namespace sriqa {

using nlohmann::json;

namespace {

json config_to_json_obj(const TrainConfig& c) {
    return json{{"framework", to_string(c.framework)},
                {"seed", c.seed},
                {"learning_rate", c.learning_rate},
                {"epochs", c.epochs},
                {"batch_patches", c.batch_patches},
                {"records_per_step", c.records_per_step},
                {"patch_size", c.patch_size},
                {"optimizer", to_string(c.optimizer)}};
}

TrainConfig config_from_json_obj(const json& j) {
    TrainConfig c;
    try {
        c.framework = parse_framework(j.at("framework").get<std::string>());
        c.seed = j.at("seed").get<std::uint64_t>();
        c.learning_rate = j.at("learning_rate").get<double>();
        c.epochs = j.at("epochs").get<int>();
        c.batch_patches = j.at("batch_patches").get<int>();
        c.records_per_step = j.at("records_per_step").get<int>();
        c.patch_size = j.at("patch_size").get<int>();
        c.optimizer = parse_optimizer(j.at("optimizer").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::invalid_config, std::string("bad train config: ") + e.what());
    }
    c.validate();
    return c;
}

} // namespace

std::string TrainConfig::to_json() const {
    return config_to_json_obj(*this).dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorKind::invalid_config, "train config is not valid JSON");
    return config_from_json_obj(j);
}

void Checkpoint::save(const std::string& path) const {
    json header;
    header["magic"] = "sriqa.ckpt";
    header["format_version"] = 1;
    header["tool_version"] = kVersion;
    header["config"] = config_to_json_obj(config);
    header["epoch"] = epoch;
    // u64 state words go through strings; JSON numbers cannot hold them exactly
    json st = json::array();
    for (std::uint64_t w : rng_state) st.push_back(std::to_string(w));
    header["rng_state"] = st;
    json blks = json::array();
    for (const Block& b : blocks)
        blks.push_back(json{{"name", b.name}, {"shape", {b.rows, b.cols}}});
    header["blocks"] = blks;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path + "' for writing");
    out << header.dump() << '\n';
    for (const Block& b : blocks)
        out.write(reinterpret_cast<const char*>(b.data.data()),
                  static_cast<std::streamsize>(b.data.size() * sizeof(float)));
    out.flush();
    if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorKind::io, "'" + path + "' has no checkpoint header");
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("magic", "") != "sriqa.ckpt")
        throw Error(ErrorKind::io, "'" + path + "' is not a checkpoint file");

    Checkpoint ck;
    try {
        ck.config = config_from_json_obj(header.at("config"));
        ck.epoch = header.at("epoch").get<int>();
        const json& st = header.at("rng_state");
        if (!st.is_array() || st.size() != ck.rng_state.size())
            throw Error(ErrorKind::io, "checkpoint rng_state must have 4 words");
        for (std::size_t i = 0; i < ck.rng_state.size(); ++i)
            ck.rng_state[i] = std::stoull(st[i].get<std::string>());
        for (const json& jb : header.at("blocks")) {
            Block b;
            b.name = jb.at("name").get<std::string>();
            b.rows = jb.at("shape").at(0).get<std::int64_t>();
            b.cols = jb.at("shape").at(1).get<std::int64_t>();
            if (b.rows < 0 || b.cols < 0)
                throw Error(ErrorKind::io, "negative block shape in checkpoint");
            b.data.resize(static_cast<std::size_t>(b.rows) * b.cols);
            in.read(reinterpret_cast<char*>(b.data.data()),
                    static_cast<std::streamsize>(b.data.size() * sizeof(float)));
            if (!in)
                throw Error(ErrorKind::io, "checkpoint truncated in block '" + b.name + "'");
            ck.blocks.push_back(std::move(b));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::io, std::string("malformed checkpoint header: ") + e.what());
    }
    return ck;
}

} // namespace sriqa
