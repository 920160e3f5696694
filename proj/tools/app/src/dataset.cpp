#include "dfhc_app/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "dfhc/error.hpp"
#include "dfhc/rng.hpp"
#include "dfhc_app/text.hpp"

namespace dfhc::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
    return doc.contains(key) ? doc.at(key).get<T>() : fallback;
}

void reject_unknown_keys(const json& doc, std::initializer_list<std::string_view> known, const std::string& where) {
    for (const auto& [key, _] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

}  // namespace

void DatasetManifest::validate() const {
    if (files.empty()) throw ConfigError("manifest lists no files");
    if (schema.empty()) throw ConfigError("manifest schema has no clusters");
    std::set<std::string> seen;
    for (const auto& c : schema) {
        if (c.columns.empty() || c.columns.size() > 3) {
            throw ConfigError("cluster '" + c.name + "' must map 1 to 3 columns");
        }
        for (const auto& col : c.columns) {
            if (!seen.insert(col).second) throw ConfigError("column '" + col + "' is used twice in the schema");
        }
    }
    for (const auto& f : files) {
        if (!f.label && !label_column) {
            throw ConfigError("file '" + f.path.string() + "' has no label and the manifest has no label_column");
        }
        if (f.label) check_label(*f.label);
    }
    if (label_column && seen.count(*label_column)) {
        throw ConfigError("label column '" + *label_column + "' is also a data column");
    }
    if (grouping == Grouping::Stream) {
        if (!window_len) throw ConfigError("stream grouping needs window_len (it has no default)");
        if (*window_len == 0 || overlap >= *window_len) {
            throw ConfigError("need window_len > overlap >= 0");
        }
    }
}

DatasetManifest manifest_from_json(const json& doc, const fs::path& base_dir) {
    try {
        reject_unknown_keys(doc,
                            {"root", "files", "dirs", "schema", "label_column", "grouping", "window_len",
                             "overlap", "sampling_rate"},
                            "manifest");
        DatasetManifest m;
        const fs::path root = get_or<std::string>(doc, "root", ".");
        m.root = root.is_absolute() ? root : base_dir / root;
        auto read_entries = [&](const char* key, bool is_dir) {
            if (!doc.contains(key)) return;
            for (const auto& e : doc.at(key)) {
                FileEntry f;
                f.is_dir = is_dir;
                if (e.is_string()) {
                    f.path = e.get<std::string>();
                } else {
                    reject_unknown_keys(e, {"path", "label"}, std::string("manifest ") + key + " entry");
                    f.path = e.at("path").get<std::string>();
                    if (e.contains("label")) f.label = e.at("label").get<std::string>();
                }
                m.files.push_back(std::move(f));
            }
        };
        read_entries("files", false);
        read_entries("dirs", true);
        for (const auto& c : doc.at("schema")) {
            m.schema.push_back({c.at("name").get<std::string>(), c.at("columns").get<std::vector<std::string>>()});
        }
        if (doc.contains("label_column")) m.label_column = doc.at("label_column").get<std::string>();
        const std::string grouping = get_or<std::string>(doc, "grouping", "stream");
        if (grouping == "stream") {
            m.grouping = Grouping::Stream;
        } else if (grouping == "per_file") {
            m.grouping = Grouping::PerFile;
        } else {
            throw ConfigError("grouping must be 'stream' or 'per_file', got '" + grouping + "'");
        }
        if (doc.contains("window_len")) m.window_len = doc.at("window_len").get<std::size_t>();
        m.overlap = get_or<std::size_t>(doc, "overlap", 0);
        if (doc.contains("sampling_rate")) m.sampling_rate = doc.at("sampling_rate").get<double>();
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
}

DatasetManifest load_manifest(const fs::path& path) {
    return manifest_from_json(read_json_file(path), path.parent_path());
}

json manifest_to_json(const DatasetManifest& m) {
    json doc;
    doc["root"] = m.root.generic_string();
    json files = json::array(), dirs = json::array();
    for (const auto& f : m.files) {
        json e{{"path", f.path.generic_string()}};
        if (f.label) e["label"] = *f.label;
        (f.is_dir ? dirs : files).push_back(e);
    }
    if (!files.empty()) doc["files"] = files;
    if (!dirs.empty()) doc["dirs"] = dirs;
    doc["schema"] = json::array();
    for (const auto& c : m.schema) doc["schema"].push_back({{"name", c.name}, {"columns", c.columns}});
    if (m.label_column) doc["label_column"] = *m.label_column;
    doc["grouping"] = m.grouping == Grouping::Stream ? "stream" : "per_file";
    if (m.window_len) doc["window_len"] = *m.window_len;
    doc["overlap"] = m.overlap;
    if (m.sampling_rate) doc["sampling_rate"] = *m.sampling_rate;
    return doc;
}

namespace {

struct CsvSource {
    fs::path path;
    std::string id;
    std::optional<std::string> label;
};

std::vector<CsvSource> expand_sources(const DatasetManifest& m) {
    std::vector<CsvSource> out;
    for (const auto& f : m.files) {
        const fs::path full = f.path.is_absolute() ? f.path : m.root / f.path;
        if (!f.is_dir) {
            out.push_back({full, sanitize_id(fs::path(f.path).replace_extension().generic_string()), f.label});
            continue;
        }
        if (!fs::is_directory(full)) throw IoError(full.string(), "not a directory");
        std::vector<fs::path> found;
        for (const auto& e : fs::directory_iterator(full)) {
            if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
        }
        std::sort(found.begin(), found.end());
        for (const auto& p : found) {
            const fs::path rel = f.path / p.filename();
            out.push_back({p, sanitize_id(fs::path(rel).replace_extension().generic_string()), f.label});
        }
    }
    std::set<std::string> ids;
    for (const auto& s : out) {
        if (!ids.insert(s.id).second) throw ConfigError("two manifest files map to source id '" + s.id + "'");
    }
    return out;
}

std::string at_location(const fs::path& path, std::size_t row, const std::string& column) {
    std::ostringstream msg;
    msg << path.string() << ": row " << row;
    if (!column.empty()) msg << ", column '" << column << "'";
    return msg.str();
}

}  // namespace

LoadedDataset load_csv_dataset(const DatasetManifest& manifest) {
    manifest.validate();
    LoadedDataset out;
    for (const CsvSource& src : expand_sources(manifest)) {
        const CsvTable table = read_csv(src.path);
        if (table.header.empty()) {
            out.warnings.push_back(src.path.string() + ": empty file, no segments");
            continue;
        }
        auto column_index = [&](const std::string& name) {
            const auto it = std::find(table.header.begin(), table.header.end(), name);
            if (it == table.header.end()) {
                throw DataError(src.path.string() + ": missing column '" + name + "'");
            }
            return static_cast<std::size_t>(it - table.header.begin());
        };

        SeriesSegment stream;
        stream.source_id = src.id;
        std::vector<std::vector<std::size_t>> cols;
        for (const auto& c : manifest.schema) {
            Cluster cluster;
            cluster.channels.resize(c.columns.size());
            std::vector<std::size_t> idx;
            for (const auto& name : c.columns) idx.push_back(column_index(name));
            cols.push_back(std::move(idx));
            stream.clusters.push_back(std::move(cluster));
        }
        std::optional<std::size_t> label_idx;
        if (!src.label) label_idx = column_index(*manifest.label_column);

        std::optional<std::string> label = src.label;
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            const std::size_t line = table.first_data_line + r;
            if (row.size() != table.header.size()) {
                throw DataError(at_location(src.path, line, "") + ": expected " +
                                std::to_string(table.header.size()) + " fields, got " +
                                std::to_string(row.size()));
            }
            for (std::size_t c = 0; c < cols.size(); ++c) {
                for (std::size_t j = 0; j < cols[c].size(); ++j) {
                    const std::string& cell = row[cols[c][j]];
                    const auto v = parse_double(cell);
                    if (!v || !std::isfinite(*v)) {
                        throw DataError(at_location(src.path, line, table.header[cols[c][j]]) +
                                        ": not a finite number: '" + cell + "'");
                    }
                    stream.clusters[c].channels[j].push_back(*v);
                }
            }
            if (label_idx) {
                const std::string& cell = row[*label_idx];
                if (cell.empty()) {
                    throw DataError(at_location(src.path, line, *manifest.label_column) + ": empty label");
                }
                if (!label) {
                    label = cell;
                } else if (*label != cell) {
                    throw DataError(at_location(src.path, line, *manifest.label_column) + ": label '" + cell +
                                    "' differs from '" + *label + "' earlier in the file");
                }
            }
        }
        if (table.rows.empty()) {
            out.warnings.push_back(src.path.string() + ": no data rows, no segments");
            continue;
        }
        check_label(*label);
        stream.label = *label;

        if (manifest.grouping == Grouping::PerFile) {
            out.segments.push_back(std::move(stream));
            continue;
        }
        auto windows = window_segments(stream, *manifest.window_len, manifest.overlap);
        if (windows.empty()) {
            out.warnings.push_back(src.path.string() + ": " + std::to_string(stream.length()) +
                                   " rows, shorter than one window");
        }
        for (auto& w : windows) out.segments.push_back(std::move(w));
    }
    return out;
}

void SynthSpec::validate() const {
    if (classes.size() < 2) throw ConfigError("synthetic spec needs at least 2 classes");
    if (cluster_dims.empty()) throw ConfigError("synthetic spec needs at least one cluster");
    for (std::size_t q : cluster_dims) {
        if (q < 1 || q > 3) throw ConfigError("cluster dims must be 1..3");
    }
    if (length < 4) throw ConfigError("synthetic length must be >= 4");
    if (samples_per_class == 0) throw ConfigError("samples_per_class must be positive");
    if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be >= 0");
    std::set<std::string> names;
    for (std::size_t a = 0; a < classes.size(); ++a) {
        check_label(classes[a].name);
        if (!names.insert(classes[a].name).second) {
            throw ConfigError("duplicate synthetic class name '" + classes[a].name + "'");
        }
        for (std::size_t b = 0; b < a; ++b) {
            if (classes[a].frequency == classes[b].frequency && classes[a].amplitude == classes[b].amplitude) {
                throw ConfigError("synthetic classes '" + classes[b].name + "' and '" + classes[a].name +
                                  "' share one recipe");
            }
        }
    }
}

SynthSpec synth_spec_from_json(const json& doc) {
    try {
        reject_unknown_keys(doc, {"classes", "cluster_dims", "length", "samples_per_class", "noise_sigma", "seed"},
                            "synthetic spec");
        SynthSpec s;
        for (const auto& c : doc.at("classes")) {
            reject_unknown_keys(c, {"name", "frequency", "amplitude"}, "synthetic class");
            s.classes.push_back({c.at("name").get<std::string>(), c.at("frequency").get<double>(),
                                 get_or<double>(c, "amplitude", 1.0)});
        }
        s.cluster_dims = get_or<std::vector<std::size_t>>(doc, "cluster_dims", s.cluster_dims);
        s.length = get_or<std::size_t>(doc, "length", s.length);
        s.samples_per_class = get_or<std::size_t>(doc, "samples_per_class", s.samples_per_class);
        s.noise_sigma = get_or<double>(doc, "noise_sigma", s.noise_sigma);
        s.seed = get_or<std::uint64_t>(doc, "seed", s.seed);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed synthetic spec: ") + e.what());
    }
}

json synth_spec_to_json(const SynthSpec& s) {
    json doc;
    doc["classes"] = json::array();
    for (const auto& c : s.classes) {
        doc["classes"].push_back({{"name", c.name}, {"frequency", c.frequency}, {"amplitude", c.amplitude}});
    }
    doc["cluster_dims"] = s.cluster_dims;
    doc["length"] = s.length;
    doc["samples_per_class"] = s.samples_per_class;
    doc["noise_sigma"] = s.noise_sigma;
    doc["seed"] = s.seed;
    return doc;
}

std::vector<SeriesSegment> generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::size_t channels = 0;
    for (std::size_t q : spec.cluster_dims) channels += q;
    const double two_pi = 2.0 * std::numbers::pi;
    const double len = static_cast<double>(spec.length);

    std::vector<SeriesSegment> out;
    out.reserve(spec.classes.size() * spec.samples_per_class);
    for (const auto& cls : spec.classes) {
        for (std::size_t i = 0; i < spec.samples_per_class; ++i) {
            SeriesSegment seg;
            seg.label = cls.name;
            seg.source_id = cls.name + "_" + zero_pad(i, spec.samples_per_class);
            const double phase = rng.uniform(0.0, two_pi);
            std::size_t j = 0;
            for (std::size_t q : spec.cluster_dims) {
                Cluster cluster;
                for (std::size_t d = 0; d < q; ++d, ++j) {
                    const double offset = two_pi * static_cast<double>(j) / static_cast<double>(channels);
                    Channel ch(spec.length);
                    for (std::size_t t = 0; t < spec.length; ++t) {
                        const double arg = two_pi * cls.frequency * static_cast<double>(t) / len + phase + offset;
                        ch[t] = cls.amplitude * std::sin(arg) + spec.noise_sigma * rng.normal();
                    }
                    cluster.channels.push_back(std::move(ch));
                }
                seg.clusters.push_back(std::move(cluster));
            }
            out.push_back(std::move(seg));
        }
    }
    return out;
}

std::string synth_column_name(std::size_t cluster, std::size_t channel) {
    static constexpr const char* kAxis[] = {"x", "y", "z"};
    return "c" + std::to_string(cluster) + "_" + kAxis[channel];
}

fs::path write_synthetic_dataset(const SynthSpec& spec, const fs::path& out_dir) {
    const auto segments = generate_synthetic(spec);
    const fs::path data_dir = out_dir / "data";
    fs::create_directories(data_dir);

    DatasetManifest m;
    m.root = "data";
    m.grouping = Grouping::PerFile;
    for (std::size_t c = 0; c < spec.cluster_dims.size(); ++c) {
        ClusterColumns cc{"c" + std::to_string(c), {}};
        for (std::size_t d = 0; d < spec.cluster_dims[c]; ++d) cc.columns.push_back(synth_column_name(c, d));
        m.schema.push_back(std::move(cc));
    }
    for (const auto& seg : segments) {
        const fs::path file = data_dir / (seg.source_id + ".csv");
        std::ostringstream csv;
        bool first = true;
        for (const auto& cc : m.schema) {
            for (const auto& col : cc.columns) {
                csv << (first ? "" : ",") << col;
                first = false;
            }
        }
        csv << '\n';
        for (std::size_t t = 0; t < seg.length(); ++t) {
            first = true;
            for (const auto& cluster : seg.clusters) {
                for (const auto& ch : cluster.channels) {
                    csv << (first ? "" : ",") << format_double(ch[t]);
                    first = false;
                }
            }
            csv << '\n';
        }
        write_text_file(file, csv.str());
        m.files.push_back({seg.source_id + ".csv", false, seg.label});
    }
    const fs::path manifest_path = out_dir / "manifest.json";
    json doc = manifest_to_json(m);
    doc["root"] = "data";
    write_text_file(manifest_path, doc.dump(2) + "\n");
    write_text_file(out_dir / "synth_spec.json", synth_spec_to_json(spec).dump(2) + "\n");
    return manifest_path;
}

}  // namespace dfhc::app
