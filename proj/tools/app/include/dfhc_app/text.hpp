#pragma once

// Small file and text helpers shared by the commands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace dfhc::app {

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories; throws IoError naming the path.
void write_text_file(const std::filesystem::path& path, std::string_view text);
nlohmann::json read_json_file(const std::filesystem::path& path);

struct CsvTable {
    std::vector<std::string> header;  ///< empty for an empty file
    std::vector<std::vector<std::string>> rows;
    std::size_t first_data_line = 2;  ///< 1-based line number of rows[0]
};

/// Comma-separated, first non-blank line is the header. Double-quoted fields
/// may contain commas ("" escapes a quote). Blank lines are skipped and
/// surrounding whitespace is trimmed.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Whole-string decimal parse; nullopt on junk or trailing characters.
std::optional<double> parse_double(std::string_view text);
/// Shortest representation that parses back to the same double.
std::string format_double(double v);

/// Replaces anything outside [A-Za-z0-9._-] with '_'.
std::string sanitize_id(std::string_view text);
/// Labels end up in CSV cells; rejects empty labels and ones with commas,
/// quotes or line breaks (ConfigError).
void check_label(std::string_view label);
/// i padded with zeros to the width of n - 1.
std::string zero_pad(std::size_t i, std::size_t n);

/// 64-bit FNV-1a, hex encoded. Used for dataset fingerprints and image hashes.
std::string fnv1a_hex(std::span<const std::uint8_t> bytes);
std::string fnv1a_hex(std::string_view text);

}  // namespace dfhc::app
