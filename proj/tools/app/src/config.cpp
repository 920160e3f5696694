#include "dfhc_app/config.hpp"

#include <charconv>
#include <cstdlib>
#include <string>

#include "dfhc/error.hpp"
#include "dfhc_app/text.hpp"

namespace dfhc::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, std::initializer_list<std::string_view> known, const std::string& where) {
    if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : doc.items()) {
        bool ok = false;
        for (auto k : known) ok = ok || k == key;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

}  // namespace

void RunConfig::validate() const {
    codec.validate();
    if (window_len && *window_len == 0) throw ConfigError("window_len must be positive");
    if (window_len && overlap && *overlap >= *window_len) throw ConfigError("overlap must be < window_len");
    if (train.batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(train.lr >= 0.0)) throw ConfigError("lr must be >= 0");
    if (!(train.momentum >= 0.0 && train.momentum < 1.0)) throw ConfigError("momentum must be in [0, 1)");
}

RunConfig config_from_json(const json& doc) {
    try {
        reject_unknown(doc, {"codec", "window_len", "overlap", "seed", "train", "threads"}, "config");
        RunConfig c;
        if (doc.contains("codec")) {
            const json& k = doc.at("codec");
            reject_unknown(k, {"method", "target_size", "step", "wavelet_level", "wavelet_series", "radon_angles"},
                           "config codec");
            if (k.contains("method")) {
                const auto name = k.at("method").get<std::string>();
                const auto m = parse_method(name);
                if (!m) throw ConfigError("unknown coding method '" + name + "'");
                c.codec.method = *m;
            }
            if (k.contains("target_size")) c.codec.target_size = k.at("target_size").get<std::size_t>();
            if (k.contains("step")) c.codec.step.step = k.at("step").get<std::size_t>();
            if (k.contains("wavelet_level")) c.codec.wavelet_level = k.at("wavelet_level").get<std::size_t>();
            if (k.contains("radon_angles")) c.codec.radon_angles = k.at("radon_angles").get<std::size_t>();
            if (k.contains("wavelet_series")) {
                const auto s = k.at("wavelet_series").get<std::string>();
                if (s == "coefficients") {
                    c.codec.wavelet_series = WaveletSeries::Coefficients;
                } else if (s == "approximation") {
                    c.codec.wavelet_series = WaveletSeries::Approximation;
                } else {
                    throw ConfigError("wavelet_series must be 'coefficients' or 'approximation'");
                }
            }
        }
        if (doc.contains("window_len")) c.window_len = doc.at("window_len").get<std::size_t>();
        if (doc.contains("overlap")) c.overlap = doc.at("overlap").get<std::size_t>();
        if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("threads")) c.threads = doc.at("threads").get<std::size_t>();
        if (doc.contains("train")) {
            const json& t = doc.at("train");
            reject_unknown(t, {"epochs", "batch_size", "lr", "momentum"}, "config train");
            if (t.contains("epochs")) c.train.epochs = t.at("epochs").get<std::size_t>();
            if (t.contains("batch_size")) c.train.batch_size = t.at("batch_size").get<std::size_t>();
            if (t.contains("lr")) c.train.lr = t.at("lr").get<double>();
            if (t.contains("momentum")) c.train.momentum = t.at("momentum").get<double>();
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

json config_to_json(const RunConfig& c) {
    json doc;
    doc["codec"] = {{"method", std::string(method_name(c.codec.method))},
                    {"target_size", c.codec.target_size},
                    {"step", c.codec.step.step},
                    {"wavelet_level", c.codec.wavelet_level},
                    {"wavelet_series",
                     c.codec.wavelet_series == WaveletSeries::Coefficients ? "coefficients" : "approximation"},
                    {"radon_angles", c.codec.radon_angles}};
    if (c.window_len) doc["window_len"] = *c.window_len;
    if (c.overlap) doc["overlap"] = *c.overlap;
    doc["seed"] = c.seed;
    doc["threads"] = c.threads;
    doc["train"] = {{"epochs", c.train.epochs},
                    {"batch_size", c.train.batch_size},
                    {"lr", c.train.lr},
                    {"momentum", c.train.momentum}};
    return doc;
}

RunConfig load_config(const std::filesystem::path& path) {
    if (path.empty()) return RunConfig{};
    return config_from_json(read_json_file(path));
}

void apply_seed_override(RunConfig& config) {
    const char* env = std::getenv("DFHC_SEED");
    if (env == nullptr || *env == '\0') return;
    const std::string_view text(env);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("DFHC_SEED must be a non-negative integer, got '" + std::string(text) + "'");
    }
    config.seed = seed;
}

}  // namespace dfhc::app
