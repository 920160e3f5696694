#include "dfhc/cnn/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dfhc/error.hpp"

namespace dfhc::cnn {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "dfhc-cnn";

json layer_to_json(const Layer& layer) {
    json j;
    j["kind"] = std::string(layer_kind(layer));
    if (const auto* conv = std::get_if<Conv2D>(&layer)) {
        j["in_channels"] = conv->in_channels;
        j["out_channels"] = conv->out_channels;
        j["kernel"] = conv->kernel;
        j["weights"] = conv->weights;
        j["bias"] = conv->bias;
    } else if (const auto* dense = std::get_if<Dense>(&layer)) {
        j["in_features"] = dense->in_features;
        j["out_features"] = dense->out_features;
        j["weights"] = dense->weights;
        j["bias"] = dense->bias;
    }
    return j;
}

template <typename T>
void load_params(const json& j, T& layer) {
    auto weights = j.at("weights").get<std::vector<double>>();
    auto bias = j.at("bias").get<std::vector<double>>();
    if (weights.size() != layer.weights.size() || bias.size() != layer.bias.size()) {
        throw ConfigError("checkpoint parameter arrays do not match the declared layer dims");
    }
    layer.weights = std::move(weights);
    layer.bias = std::move(bias);
}

Layer layer_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "conv") {
        Conv2D conv(j.at("in_channels").get<std::size_t>(), j.at("out_channels").get<std::size_t>(),
                    j.at("kernel").get<std::size_t>());
        load_params(j, conv);
        return conv;
    }
    if (kind == "dense") {
        Dense dense(j.at("in_features").get<std::size_t>(), j.at("out_features").get<std::size_t>());
        load_params(j, dense);
        return dense;
    }
    if (kind == "relu") return ReLU{};
    if (kind == "maxpool") return MaxPool2{};
    if (kind == "softmax") return Softmax{};
    throw ConfigError("unknown layer kind in checkpoint: " + kind);
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
    const CnnModel& model = checkpoint.model;
    json j;
    j["format"] = kFormat;
    j["version"] = kCheckpointVersion;
    j["input"] = {{"channels", model.input().channels},
                  {"height", model.input().height},
                  {"width", model.input().width}};
    j["num_classes"] = model.num_classes();
    j["seed"] = model.seed();
    j["class_names"] = checkpoint.class_names;
    json layers = json::array();
    for (const auto& layer : model.layers()) layers.push_back(layer_to_json(layer));
    j["layers"] = std::move(layers);
    return j.dump();
}

Checkpoint checkpoint_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("format").get<std::string>() != kFormat) {
            throw ConfigError("not a dfhc-cnn checkpoint");
        }
        const int version = j.at("version").get<int>();
        if (version != kCheckpointVersion) {
            throw ConfigError("unsupported checkpoint version " + std::to_string(version));
        }
        InputDims input{j.at("input").at("channels").get<std::size_t>(),
                        j.at("input").at("height").get<std::size_t>(),
                        j.at("input").at("width").get<std::size_t>()};
        std::vector<Layer> layers;
        for (const auto& lj : j.at("layers")) layers.push_back(layer_from_json(lj));
        Checkpoint cp{CnnModel(input, std::move(layers), j.value("seed", std::uint64_t{0})),
                      j.value("class_names", std::vector<std::string>{})};
        if (cp.model.num_classes() != j.at("num_classes").get<std::size_t>()) {
            throw ConfigError("checkpoint num_classes does not match its layer stack");
        }
        return cp;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed checkpoint: ") + e.what());
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("inconsistent checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << checkpoint_to_json(checkpoint) << '\n';
    if (!out) throw IoError(path.string(), "write failed");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open checkpoint");
    std::ostringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_json(buf.str());
}

}  // namespace dfhc::cnn
