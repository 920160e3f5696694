#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

#include "dfhc/cnn/train.hpp"
#include "dfhc/codec.hpp"

namespace dfhc::app {

/// Everything a run needs besides the data: codec, optional window
/// override, seed, CNN hyperparameters and encoder parallelism.
struct RunConfig {
    CodecSpec codec;
    std::optional<std::size_t> window_len;  ///< overrides the manifest
    std::optional<std::size_t> overlap;
    std::uint64_t seed = 0;
    cnn::TrainOptions train;
    std::size_t threads = 1;  ///< 0 = one per hardware thread

    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);
/// Defaults when path is empty.
RunConfig load_config(const std::filesystem::path& path);

/// DFHC_SEED, when set, replaces config.seed. Non-numeric values are a
/// ConfigError.
void apply_seed_override(RunConfig& config);

}  // namespace dfhc::app
