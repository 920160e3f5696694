#include "dfhc_app/commands.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "dfhc/cnn/checkpoint.hpp"
#include "dfhc/cnn/model.hpp"
#include "dfhc/cnn/train.hpp"
#include "dfhc/error.hpp"
#include "dfhc/png_io.hpp"
#include "dfhc_app/text.hpp"

namespace dfhc::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* const kIndexHeader = "path,label,source_id,method,size,channels,fold_width,l_eff,split_eligible";

std::size_t to_count(const std::string& cell, const fs::path& file, std::size_t line, const char* column) {
    const auto v = parse_double(cell);
    if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
        throw DataError(file.string() + ": row " + std::to_string(line) + ", column '" + column +
                        "': expected a count, got '" + cell + "'");
    }
    return static_cast<std::size_t>(*v);
}

std::string percent(double accuracy) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << accuracy * 100.0 << "%";
    return s.str();
}

}  // namespace

void write_index(const fs::path& path, const std::vector<IndexRow>& rows) {
    std::ostringstream out;
    out << kIndexHeader << '\n';
    for (const auto& r : rows) {
        out << r.path << ',' << r.label << ',' << r.source_id << ',' << r.method << ',' << r.size << ','
            << r.channels << ',' << r.fold_width << ',' << r.l_eff << ',' << (r.split_eligible ? 1 : 0) << '\n';
    }
    write_text_file(path, out.str());
}

std::vector<IndexRow> read_index(const fs::path& path) {
    const CsvTable table = read_csv(path);
    const auto expected = parse_csv(kIndexHeader).header;
    if (table.header != expected) {
        throw DataError(path.string() + ": not an index file (header must be '" + kIndexHeader + "')");
    }
    std::vector<IndexRow> rows;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& f = table.rows[i];
        const std::size_t line = table.first_data_line + i;
        if (f.size() != expected.size()) {
            throw DataError(path.string() + ": row " + std::to_string(line) + ": expected " +
                            std::to_string(expected.size()) + " fields");
        }
        IndexRow r;
        r.path = f[0];
        r.label = f[1];
        r.source_id = f[2];
        r.method = f[3];
        r.size = to_count(f[4], path, line, "size");
        r.channels = to_count(f[5], path, line, "channels");
        r.fold_width = to_count(f[6], path, line, "fold_width");
        r.l_eff = to_count(f[7], path, line, "l_eff");
        r.split_eligible = to_count(f[8], path, line, "split_eligible") != 0;
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string dataset_fingerprint(const std::vector<IndexRow>& rows) {
    std::vector<std::string> keys;
    keys.reserve(rows.size());
    for (const auto& r : rows) keys.push_back(r.source_id + '\t' + r.label);
    std::sort(keys.begin(), keys.end());
    std::string joined;
    for (const auto& k : keys) joined += k + '\n';
    return fnv1a_hex(joined);
}

EncodeSummary cmd_encode(const DatasetManifest& manifest_in, const RunConfig& config, const fs::path& out_dir,
                         std::ostream& log) {
    config.validate();
    DatasetManifest manifest = manifest_in;
    if (config.window_len) manifest.window_len = config.window_len;
    if (config.overlap) manifest.overlap = *config.overlap;

    LoadedDataset data = load_csv_dataset(manifest);
    for (const auto& w : data.warnings) log << "warning: " << w << '\n';
    const auto& segments = data.segments;
    if (segments.empty()) throw DataError("the manifest produced no segments");

    std::vector<std::optional<EncodedImage>> results(segments.size());
    std::vector<std::string> errors(segments.size());
    std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = std::min(threads, segments.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < segments.size(); i = next++) {
            try {
                results[i] = encode_segment(segments[i], config.codec);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    const std::string method(method_name(config.codec.method));
    std::map<std::string, std::size_t> per_class;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (results[i]) ++per_class[segments[i].label];
    }
    EncodeSummary summary;
    std::vector<IndexRow> rows;
    fs::create_directories(out_dir / "images");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!results[i]) {
            log << "error: segment '" << segments[i].source_id << "' skipped: " << errors[i] << '\n';
            ++summary.failed;
            continue;
        }
        const EncodedImage& enc = *results[i];
        const std::string rel = "images/" + segments[i].source_id + "_" + method + ".png";
        write_png(out_dir / rel, enc.image);
        rows.push_back({rel, segments[i].label, segments[i].source_id, method, enc.image.width(),
                        enc.image.channels(), enc.plan.width, enc.plan.effective_len,
                        per_class[segments[i].label] >= kMinSamplesPerClass});
        ++summary.encoded;
    }
    if (rows.empty()) throw DataError("every segment failed to encode");
    summary.index_path = out_dir / "index.csv";
    write_index(summary.index_path, rows);
    json meta{{"method", method},
              {"segments", segments.size()},
              {"encoded", summary.encoded},
              {"failed", summary.failed},
              {"dataset_fingerprint", dataset_fingerprint(rows)},
              {"config", config_to_json(config)},
              {"manifest", manifest_to_json(manifest)},
              {"warnings", data.warnings}};
    write_text_file(out_dir / "encode.json", meta.dump(2) + "\n");
    log << "encoded " << summary.encoded << " of " << segments.size() << " segments with " << method << " into "
        << summary.index_path.string() << '\n';
    return summary;
}

json cmd_train(const fs::path& index_path, const RunConfig& config_in, const fs::path& out_dir, std::ostream& log) {
    RunConfig config = config_in;
    config.validate();
    const auto rows = read_index(index_path);
    if (rows.empty()) throw DataError(index_path.string() + ": index lists no images");

    std::set<std::string> label_set, methods;
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rows) {
        label_set.insert(r.label);
        methods.insert(r.method);
        ++counts[r.label];
    }
    if (methods.size() != 1) throw DataError(index_path.string() + ": index mixes several coding methods");
    if (label_set.size() < 2) throw DataError("training needs at least 2 classes, found " + std::to_string(label_set.size()));
    for (const auto& [label, n] : counts) {
        if (n < kMinSamplesPerClass) {
            throw DataError("class '" + label + "' has " + std::to_string(n) + " images; at least " +
                            std::to_string(kMinSamplesPerClass) + " are needed for a 7:1:2 split");
        }
    }
    const std::vector<std::string> classes(label_set.begin(), label_set.end());
    auto class_of = [&](const std::string& label) {
        return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), label) - classes.begin());
    };

    const fs::path base = index_path.parent_path();
    std::vector<cnn::LabeledImage> samples;
    samples.reserve(rows.size());
    for (const auto& r : rows) {
        ImageRaster img = to_raster(read_png(base / r.path));
        if (img.width() != r.size || img.height() != r.size || img.channels() != r.channels) {
            throw DataError((base / r.path).string() + ": decoded " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + "x" + std::to_string(img.channels()) +
                            " but the index declares " + std::to_string(r.size) + "x" + std::to_string(r.size) +
                            "x" + std::to_string(r.channels));
        }
        samples.push_back({std::move(img), class_of(r.label), r.source_id});
    }
    const std::size_t size = rows.front().size;
    const std::size_t channels = rows.front().channels;
    for (const auto& r : rows) {
        if (r.size != size || r.channels != channels) throw DataError("index mixes image geometries");
    }
    if (size != 32 && size != 64) {
        throw ConfigError("the classifier takes 32x32 or 64x64 images, the index has " + std::to_string(size));
    }

    cnn::SplitDataset splits = cnn::split_7_1_2(std::move(samples), config.seed);
    for (const auto& w : splits.warnings) log << "warning: " << w << '\n';
    cnn::CnnModel model = cnn::build_model(size, channels, classes.size(), config.seed);
    cnn::TrainOptions opts = config.train;
    opts.seed = config.seed;
    log << "training on " << splits.train.size() << " images (" << splits.val.size() << " val, "
        << splits.test.size() << " test), " << opts.epochs << " epochs\n";
    const cnn::TrainingReport tr = cnn::train(model, splits, opts);
    for (const auto& e : tr.epochs) {
        log << "epoch " << e.epoch << " loss " << e.train_loss;
        if (e.val_accuracy) log << " val " << *e.val_accuracy;
        log << '\n';
    }

    std::optional<cnn::Metrics> test;
    if (!splits.test.empty()) test = cnn::evaluate(model, splits.test);

    std::size_t w_min = rows.front().fold_width, w_max = w_min;
    for (const auto& r : rows) {
        w_min = std::min(w_min, r.fold_width);
        w_max = std::max(w_max, r.fold_width);
    }

    json report;
    report["method"] = *methods.begin();
    report["image_size"] = size;
    report["channels"] = channels;
    report["classes"] = classes;
    report["seed"] = config.seed;
    report["dataset_fingerprint"] = dataset_fingerprint(rows);
    report["samples"] = rows.size();
    report["split"] = {{"train", splits.train.size()}, {"val", splits.val.size()}, {"test", splits.test.size()}};
    report["train_options"] = config_to_json(config)["train"];
    report["fold_width"] = {{"min", w_min}, {"max", w_max}};
    report["epochs"] = json::array();
    for (const auto& e : tr.epochs) {
        report["epochs"].push_back({{"epoch", e.epoch},
                                    {"train_loss", e.train_loss},
                                    {"val_accuracy", e.val_accuracy ? json(*e.val_accuracy) : json(nullptr)}});
    }
    report["best_epoch"] = tr.best_epoch;
    report["best_val_accuracy"] = tr.best_val_accuracy ? json(*tr.best_val_accuracy) : json(nullptr);
    report["test_accuracy"] = test ? json(test->accuracy) : json(nullptr);
    report["confusion"] = test ? json(test->confusion) : json::array();
    report["warnings"] = splits.warnings;

    std::ostringstream confusion;
    if (test) {
        for (const auto& row : test->confusion) {
            for (std::size_t j = 0; j < row.size(); ++j) confusion << (j ? "," : "") << row[j];
            confusion << '\n';
        }
    }
    std::ostringstream summary;
    summary << "method        " << *methods.begin() << '\n'
            << "images        " << rows.size() << " (" << size << "x" << size << "x" << channels << ")\n"
            << "classes       " << classes.size() << '\n'
            << "split         " << splits.train.size() << " / " << splits.val.size() << " / " << splits.test.size()
            << '\n'
            << "seed          " << config.seed << '\n'
            << "best epoch    " << tr.best_epoch << '\n'
            << "test accuracy " << (test ? percent(test->accuracy) : std::string("n/a (empty test split)")) << '\n';
    if (test) {
        summary << "confusion (rows true, columns predicted):\n";
        for (std::size_t i = 0; i < classes.size(); ++i) {
            summary << "  " << std::setw(12) << std::left << classes[i] << std::right;
            for (std::size_t v : test->confusion[i]) summary << ' ' << std::setw(5) << v;
            summary << '\n';
        }
    }

    write_text_file(out_dir / "report.json", report.dump(2) + "\n");
    write_text_file(out_dir / "summary.txt", summary.str());
    write_text_file(out_dir / "confusion.csv", confusion.str());
    cnn::save_checkpoint(out_dir / "model.json", {model, classes});
    log << "test accuracy " << (test ? percent(test->accuracy) : std::string("n/a")) << ", report in "
        << (out_dir / "report.json").string() << '\n';
    return report;
}

std::vector<CompareRow> compare_runs(const std::vector<fs::path>& run_dirs, std::ostream& log) {
    if (run_dirs.size() < 2) throw ConfigError("compare needs at least 2 run directories");
    std::vector<CompareRow> rows;
    std::optional<std::string> fingerprint;
    std::optional<std::uint64_t> seed;
    for (const auto& dir : run_dirs) {
        const json r = read_json_file(dir / "report.json");
        try {
            const std::string fp = r.at("dataset_fingerprint").get<std::string>();
            if (fingerprint && *fingerprint != fp) {
                throw DataError("run '" + dir.string() + "' was trained on a different dataset (fingerprint " + fp +
                                ", expected " + *fingerprint + ")");
            }
            fingerprint = fp;
            const auto s = r.at("seed").get<std::uint64_t>();
            if (seed && *seed != s) log << "warning: runs use different split seeds\n";
            seed = s;
            if (r.at("test_accuracy").is_null()) {
                throw DataError("run '" + dir.string() + "' has no test accuracy");
            }
            CompareRow row;
            row.method = r.at("method").get<std::string>();
            row.test_accuracy = r.at("test_accuracy").get<double>();
            row.fold_width_min = r.at("fold_width").at("min").get<std::size_t>();
            row.fold_width_max = r.at("fold_width").at("max").get<std::size_t>();
            row.image_size = r.at("image_size").get<std::size_t>();
            row.test_samples = r.at("split").at("test").get<std::size_t>();
            row.run_dir = dir.string();
            rows.push_back(std::move(row));
        } catch (const json::exception& e) {
            throw DataError((dir / "report.json").string() + ": malformed report: " + e.what());
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CompareRow& a, const CompareRow& b) {
        if (a.test_accuracy != b.test_accuracy) return a.test_accuracy > b.test_accuracy;
        return a.method < b.method;
    });
    return rows;
}

namespace {

std::string width_text(const CompareRow& r) {
    return r.fold_width_min == r.fold_width_max
               ? std::to_string(r.fold_width_min)
               : std::to_string(r.fold_width_min) + "-" + std::to_string(r.fold_width_max);
}

}  // namespace

std::string comparison_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "method,test_accuracy,fold_width,image_size,test_samples,run_dir\n";
    for (const auto& r : rows) {
        out << r.method << ',' << format_double(r.test_accuracy) << ',' << width_text(r) << ',' << r.image_size
            << ',' << r.test_samples << ',' << r.run_dir << '\n';
    }
    return out.str();
}

std::string comparison_text(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(12) << "Method" << std::right << std::setw(10) << "Accuracy" << std::setw(10)
        << "Fold w" << std::setw(8) << "Size" << std::setw(8) << "Test" << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(12) << r.method << std::right << std::setw(10) << percent(r.test_accuracy)
            << std::setw(10) << width_text(r) << std::setw(8) << r.image_size << std::setw(8) << r.test_samples
            << '\n';
    }
    return out.str();
}

fs::path cmd_synth(const SynthSpec& spec, const fs::path& out_dir, std::ostream& log) {
    const fs::path manifest = write_synthetic_dataset(spec, out_dir);
    log << "wrote " << spec.classes.size() * spec.samples_per_class << " synthetic segments and "
        << manifest.string() << '\n';
    return manifest;
}

}  // namespace dfhc::app
