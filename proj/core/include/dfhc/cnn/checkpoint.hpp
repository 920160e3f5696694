#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dfhc/cnn/model.hpp"

namespace dfhc::cnn {

inline constexpr int kCheckpointVersion = 1;

/// Model plus the class names its output indices stand for.
struct Checkpoint {
    CnnModel model;
    std::vector<std::string> class_names;
};

/// JSON document {"format": "dfhc-cnn", "version": 1, "input": ..., "layers": [...]}.
/// Doubles are written with round-trip precision, so a reloaded model
/// produces bit-identical outputs.
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace dfhc::cnn
