#include "dfhc_app/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dfhc/error.hpp"

namespace dfhc::app {

namespace fs = std::filesystem;

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, std::string_view text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

nlohmann::json read_json_file(const fs::path& path) {
    const std::string text = read_text_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"' && trim(cur).empty()) {
            cur.clear();
            quoted = true;
        } else if (ch == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (table.header.empty()) {
            table.header = split_fields(line);
            table.first_data_line = line_no + 1;
        } else {
            if (table.rows.empty()) table.first_data_line = line_no;
            table.rows.push_back(split_fields(line));
        }
    }
    return table;
}

CsvTable read_csv(const fs::path& path) { return parse_csv(read_text_file(path)); }

std::optional<double> parse_double(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? ptr : buf);
}

std::string sanitize_id(std::string_view text) {
    std::string out(text);
    for (char& ch : out) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '.' || ch == '_' || ch == '-';
        if (!ok) ch = '_';
    }
    return out;
}

void check_label(std::string_view label) {
    if (label.empty()) throw ConfigError("empty class label");
    if (label.find_first_of(",\"\r\n") != std::string_view::npos) {
        throw ConfigError("class label '" + std::string(label) + "' contains a comma, quote or line break");
    }
}

std::string zero_pad(std::size_t i, std::size_t n) {
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    std::string s = std::to_string(i);
    return s.size() >= width ? s : std::string(width - s.size(), '0') + s;
}

std::string fnv1a_hex(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string fnv1a_hex(std::string_view text) {
    return fnv1a_hex(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace dfhc::app
