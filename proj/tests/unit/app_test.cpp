#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dfhc/error.hpp"
#include "dfhc/fourier.hpp"
#include "dfhc/png_io.hpp"
#include "dfhc_app/commands.hpp"
#include "dfhc_app/text.hpp"

using namespace dfhc;
using namespace dfhc::app;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("dfhc_app_" + std::string(info->test_suite_name()) + "_" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& rel, const std::string& text) {
        write_text_file(dir_ / rel, text);
        return dir_ / rel;
    }

    fs::path dir_;
};

std::string numeric_csv(const std::vector<std::string>& header, std::size_t rows, const std::string& label = "") {
    std::ostringstream out;
    for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
    if (!label.empty()) out << ",label";
    out << '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << (r * 7 + j * 3) % 11;
        if (!label.empty()) out << ',' << label;
        out << '\n';
    }
    return out.str();
}

SynthSpec two_class_spec(std::size_t per_class, double sigma) {
    SynthSpec s;
    s.classes = {{"low", 2.0, 1.0}, {"high", 8.0, 1.0}};
    s.cluster_dims = {3};
    s.length = 256;
    s.samples_per_class = per_class;
    s.noise_sigma = sigma;
    s.seed = 3;
    return s;
}

std::string file_hash(const fs::path& p) { return fnv1a_hex(read_text_file(p)); }

}  // namespace

TEST(Csv, ParsesQuotesBlankLinesAndCrlf) {
    const CsvTable t = parse_csv("a, \"b,c\" ,d\r\n\r\n1,2,3\r\n\"x \"\"q\"\"\",5,6\n\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b,c", "d"}));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][0], "x \"q\"");
    EXPECT_EQ(t.first_data_line, 3u);
    EXPECT_TRUE(parse_csv("").header.empty());
}

TEST(Csv, ParseDouble) {
    EXPECT_EQ(parse_double("1.5e3"), 1500.0);
    EXPECT_EQ(parse_double("+2"), 2.0);
    EXPECT_EQ(parse_double("-0.25"), -0.25);
    EXPECT_FALSE(parse_double("1.5x").has_value());
    EXPECT_FALSE(parse_double("").has_value());
    EXPECT_FALSE(parse_double("abc").has_value());
    for (double v : {0.1, 1.0 / 3.0, -1e-300, 12345.678}) EXPECT_EQ(parse_double(format_double(v)), v);
}

TEST(Text, Helpers) {
    EXPECT_EQ(sanitize_id("a b/c:d.e-f_g"), "a_b_c_d.e-f_g");
    EXPECT_EQ(zero_pad(7, 100), "07");
    EXPECT_EQ(zero_pad(7, 1000), "007");
    EXPECT_EQ(zero_pad(0, 1), "0");
    EXPECT_THROW(check_label("a,b"), ConfigError);
    EXPECT_THROW(check_label(""), ConfigError);
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

using Manifest = TempDir;

TEST_F(Manifest, StreamWindowsTwoColumnFile) {
    write("bearing.csv", numeric_csv({"DE", "FE"}, 10000));
    const auto m = manifest_from_json(nlohmann::json::parse(R"({
        "files": [{"path": "bearing.csv", "label": "inner"}],
        "schema": [{"name": "drive", "columns": ["DE", "FE"]}],
        "grouping": "stream", "window_len": 4096, "sampling_rate": 12000})"),
                                      dir_);
    const LoadedDataset d = load_csv_dataset(m);
    ASSERT_EQ(d.segments.size(), 10000u / 4096);
    for (const auto& s : d.segments) {
        EXPECT_EQ(s.cluster_count(), 1u);
        EXPECT_EQ(s.clusters[0].dim(), 2u);
        EXPECT_EQ(s.length(), 4096u);
        EXPECT_EQ(s.label, "inner");
    }
    EXPECT_EQ(d.segments[1].source_id, "bearing_w1");
    EXPECT_EQ(d.segments[1].clusters[0].channels[1][0], static_cast<double>((4096 * 7 + 3) % 11));
}

TEST_F(Manifest, SixColumnsTwoClustersLabelColumn) {
    write("imu/walk.csv", numeric_csv({"ax", "ay", "az", "gx", "gy", "gz"}, 50, "walk"));
    write("imu/jump.csv", numeric_csv({"ax", "ay", "az", "gx", "gy", "gz"}, 50, "jump"));
    const auto m = manifest_from_json(nlohmann::json::parse(R"({
        "dirs": ["imu"], "label_column": "label", "grouping": "per_file",
        "schema": [{"name": "acc", "columns": ["ax", "ay", "az"]},
                   {"name": "gyro", "columns": ["gx", "gy", "gz"]}]})"),
                                      dir_);
    const LoadedDataset d = load_csv_dataset(m);
    ASSERT_EQ(d.segments.size(), 2u);
    EXPECT_EQ(d.segments[0].source_id, "imu_jump");
    EXPECT_EQ(d.segments[0].label, "jump");
    EXPECT_EQ(d.segments[1].label, "walk");
    EXPECT_EQ(d.segments[0].cluster_count(), 2u);
    EXPECT_EQ(d.segments[0].channel_count(), 6u);
}

TEST_F(Manifest, EmptyFileWarns) {
    write("empty.csv", "");
    write("full.csv", numeric_csv({"x"}, 20));
    const auto m = manifest_from_json(nlohmann::json::parse(R"({
        "files": [{"path": "empty.csv", "label": "a"}, {"path": "full.csv", "label": "b"}],
        "schema": [{"name": "s", "columns": ["x"]}], "grouping": "per_file"})"),
                                      dir_);
    const LoadedDataset d = load_csv_dataset(m);
    EXPECT_EQ(d.segments.size(), 1u);
    ASSERT_EQ(d.warnings.size(), 1u);
    EXPECT_NE(d.warnings[0].find("empty.csv"), std::string::npos);
}

TEST_F(Manifest, BadCellNamesFileRowColumn) {
    write("bad.csv", "x,y\n1,2\n3,oops\n");
    const auto m = manifest_from_json(nlohmann::json::parse(R"({
        "files": [{"path": "bad.csv", "label": "a"}],
        "schema": [{"name": "s", "columns": ["x", "y"]}], "grouping": "per_file"})"),
                                      dir_);
    try {
        load_csv_dataset(m);
        FAIL();
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("bad.csv"), std::string::npos);
        EXPECT_NE(msg.find("row 3"), std::string::npos);
        EXPECT_NE(msg.find("'y'"), std::string::npos);
        EXPECT_NE(msg.find("oops"), std::string::npos);
    }
}

TEST_F(Manifest, MissingColumnAndMixedLabels) {
    write("a.csv", "x,label\n1,p\n2,q\n");
    auto doc = nlohmann::json::parse(R"({
        "files": ["a.csv"], "label_column": "label",
        "schema": [{"name": "s", "columns": ["x"]}], "grouping": "per_file"})");
    EXPECT_THROW(load_csv_dataset(manifest_from_json(doc, dir_)), DataError);
    doc["schema"][0]["columns"] = {"nope"};
    try {
        load_csv_dataset(manifest_from_json(doc, dir_));
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("missing column 'nope'"), std::string::npos);
    }
}

TEST_F(Manifest, ConfigErrors) {
    const auto base = nlohmann::json::parse(R"({
        "files": [{"path": "a.csv", "label": "x"}],
        "schema": [{"name": "s", "columns": ["x"]}], "grouping": "stream"})");
    EXPECT_THROW(manifest_from_json(base, dir_), ConfigError);  // no window_len
    auto doc = base;
    doc["window_len"] = 8;
    doc["overlap"] = 8;
    EXPECT_THROW(manifest_from_json(doc, dir_), ConfigError);
    doc["overlap"] = 2;
    EXPECT_NO_THROW(manifest_from_json(doc, dir_));
    doc["colour"] = 1;
    EXPECT_THROW(manifest_from_json(doc, dir_), ConfigError);
    doc.erase("colour");
    doc["schema"][0]["columns"] = {"a", "b", "c", "d"};
    EXPECT_THROW(manifest_from_json(doc, dir_), ConfigError);
    doc["schema"][0]["columns"] = {"a"};
    doc["files"][0].erase("label");
    EXPECT_THROW(manifest_from_json(doc, dir_), ConfigError);
}

TEST(Synth, DeterministicAndCounted) {
    const SynthSpec spec = two_class_spec(13, 0.05);
    const auto a = generate_synthetic(spec);
    const auto b = generate_synthetic(spec);
    ASSERT_EQ(a.size(), 26u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].clusters[0].channels, b[i].clusters[0].channels);
        EXPECT_EQ(a[i].source_id, b[i].source_id);
    }
    std::size_t low = 0;
    for (const auto& s : a) low += s.label == "low";
    EXPECT_EQ(low, 13u);
    SynthSpec other = spec;
    other.seed = 4;
    EXPECT_NE(generate_synthetic(other)[0].clusters[0].channels, a[0].clusters[0].channels);
}

TEST(Synth, NoiselessClassesSeparateBySpectralPeak) {
    for (const auto& s : generate_synthetic(two_class_spec(5, 0.0))) {
        for (const auto& ch : s.clusters[0].channels) {
            const auto m = dft_magnitude_centered(ch);
            const std::size_t center = ch.size() / 2;
            std::size_t peak = center + 1;
            for (std::size_t k = center + 1; k < m.size(); ++k) {
                if (m[k] > m[peak]) peak = k;
            }
            EXPECT_EQ(peak - center, s.label == "low" ? 2u : 8u);
        }
    }
}

TEST(Synth, SpecValidation) {
    SynthSpec s = two_class_spec(5, 0.0);
    s.classes[1].frequency = 2.0;
    EXPECT_THROW(s.validate(), ConfigError);
    EXPECT_THROW(synth_spec_from_json(nlohmann::json::parse(R"({"classes": [{"name": "a", "frequency": 1}]})")),
                 ConfigError);
    const SynthSpec back = synth_spec_from_json(synth_spec_to_json(two_class_spec(5, 0.1)));
    EXPECT_EQ(back.classes.size(), 2u);
    EXPECT_EQ(back.noise_sigma, 0.1);
}

TEST(Config, ParsingAndSeedOverride) {
    const RunConfig c = config_from_json(nlohmann::json::parse(
        R"({"codec": {"method": "rgb_fft", "target_size": 32}, "seed": 5, "train": {"epochs": 2}})"));
    EXPECT_EQ(c.codec.method, CodingMethod::RGB_FFT);
    EXPECT_EQ(c.codec.target_size, 32u);
    EXPECT_EQ(c.train.epochs, 2u);
    EXPECT_EQ(c.train.lr, 0.01);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"codec": {"method": "GAF"}})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"epochs": 3})")), ConfigError);
    EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"codec": {"target_size": 4}})")), ConfigError);

    RunConfig d = c;
    ::setenv("DFHC_SEED", "1234", 1);
    apply_seed_override(d);
    EXPECT_EQ(d.seed, 1234u);
    ::setenv("DFHC_SEED", "12x", 1);
    EXPECT_THROW(apply_seed_override(d), ConfigError);
    ::unsetenv("DFHC_SEED");
    const RunConfig round = config_from_json(config_to_json(c));
    EXPECT_EQ(config_to_json(round), config_to_json(c));
}

using Pipeline = TempDir;

TEST_F(Pipeline, EncodeGeometryIndexAndDeterminism) {
    std::ostringstream log;
    const fs::path manifest = cmd_synth(two_class_spec(6, 0.05), dir_ / "ds", log);
    RunConfig rgb;
    rgb.codec.method = CodingMethod::RGB;
    rgb.codec.target_size = 64;
    const auto a = cmd_encode(load_manifest(manifest), rgb, dir_ / "a", log);
    EXPECT_EQ(a.encoded, 12u);
    const auto rows = read_index(a.index_path);
    ASSERT_EQ(rows.size(), 12u);
    for (const auto& r : rows) {
        const PngPixels px = read_png(dir_ / "a" / r.path);
        EXPECT_EQ(px.width, 64u);
        EXPECT_EQ(px.height, 64u);
        EXPECT_EQ(px.channels, 3u);
        EXPECT_EQ(r.size, 64u);
        EXPECT_EQ(r.fold_width, 16u);
        EXPECT_EQ(r.l_eff, 256u);
        EXPECT_TRUE(r.split_eligible);
        EXPECT_EQ(r.path, "images/" + r.source_id + "_RGB.png");
    }

    RunConfig parallel = rgb;
    parallel.threads = 4;
    cmd_encode(load_manifest(manifest), parallel, dir_ / "b", log);
    for (const auto& r : rows) EXPECT_EQ(file_hash(dir_ / "a" / r.path), file_hash(dir_ / "b" / r.path));
    EXPECT_EQ(read_text_file(dir_ / "a/index.csv"), read_text_file(dir_ / "b/index.csv"));

    RunConfig gray = rgb;
    gray.codec.method = CodingMethod::Gray;
    const auto g = cmd_encode(load_manifest(manifest), gray, dir_ / "g", log);
    for (const auto& r : read_index(g.index_path)) {
        EXPECT_EQ(read_png(dir_ / "g" / r.path).channels, 1u);
        EXPECT_EQ(r.method, "Gray");
    }
    EXPECT_EQ(dataset_fingerprint(read_index(g.index_path)), dataset_fingerprint(rows));
}

TEST_F(Pipeline, TrainSeparableTwoClassAndRepeat) {
    std::ostringstream log;
    const fs::path manifest = cmd_synth(two_class_spec(20, 0.0), dir_ / "ds", log);
    RunConfig config;
    config.codec.target_size = 32;
    config.train.epochs = 5;
    config.train.batch_size = 8;
    config.seed = 11;
    const auto enc = cmd_encode(load_manifest(manifest), config, dir_ / "enc", log);
    const auto report = cmd_train(enc.index_path, config, dir_ / "run1", log);
    EXPECT_EQ(report.at("test_accuracy").get<double>(), 1.0);
    EXPECT_EQ(report.at("confusion").size(), 2u);
    EXPECT_EQ(report.at("confusion")[0].size(), 2u);
    EXPECT_EQ(report.at("split").at("test").get<std::size_t>(), 8u);
    for (const char* f : {"report.json", "summary.txt", "confusion.csv", "model.json"}) {
        EXPECT_TRUE(fs::exists(dir_ / "run1" / f)) << f;
    }
    EXPECT_EQ(read_text_file(dir_ / "run1/confusion.csv"), "4,0\n0,4\n");
    cmd_train(enc.index_path, config, dir_ / "run2", log);
    EXPECT_EQ(read_text_file(dir_ / "run1/report.json"), read_text_file(dir_ / "run2/report.json"));
    EXPECT_EQ(read_text_file(dir_ / "run1/model.json"), read_text_file(dir_ / "run2/model.json"));
}

TEST_F(Pipeline, TooFewSamplesPerClass) {
    std::ostringstream log;
    const fs::path manifest = cmd_synth(two_class_spec(4, 0.0), dir_ / "ds", log);
    RunConfig config;
    config.codec.target_size = 32;
    const auto enc = cmd_encode(load_manifest(manifest), config, dir_ / "enc", log);
    EXPECT_FALSE(read_index(enc.index_path)[0].split_eligible);
    EXPECT_THROW(cmd_train(enc.index_path, config, dir_ / "run", log), DataError);
}

TEST_F(Pipeline, CompareTableAndMismatch) {
    std::ostringstream log;
    const fs::path manifest = cmd_synth(two_class_spec(10, 0.05), dir_ / "ds", log);
    RunConfig config;
    config.codec.target_size = 32;
    config.train.epochs = 2;
    std::vector<fs::path> runs;
    for (CodingMethod m : {CodingMethod::RGB, CodingMethod::FFT_RGB}) {
        config.codec.method = m;
        const std::string name(method_name(m));
        const auto enc = cmd_encode(load_manifest(manifest), config, dir_ / ("enc_" + name), log);
        cmd_train(enc.index_path, config, dir_ / ("run_" + name), log);
        runs.push_back(dir_ / ("run_" + name));
    }
    const auto rows = compare_runs(runs, log);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GE(rows[0].test_accuracy, rows[1].test_accuracy);
    EXPECT_EQ(rows[0].fold_width_min, 16u);
    const std::string csv = comparison_csv(rows);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(comparison_text(rows).find("Fold w"), std::string::npos);

    const fs::path other = cmd_synth(two_class_spec(11, 0.05), dir_ / "ds2", log);
    const auto enc = cmd_encode(load_manifest(other), config, dir_ / "enc_other", log);
    cmd_train(enc.index_path, config, dir_ / "run_other", log);
    EXPECT_THROW(compare_runs({runs[0], dir_ / "run_other"}, log), DataError);
    EXPECT_THROW(compare_runs({runs[0]}, log), ConfigError);
}

using Cli = TempDir;

TEST_F(Cli, ExitCodes) {
    const std::string exe = DFHC_CLI_PATH;
    auto run = [&](const std::string& args) {
        const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(status);
    };
    write("spec.json", synth_spec_to_json(two_class_spec(6, 0.05)).dump());
    const std::string d = dir_.string();
    EXPECT_EQ(run("synth --spec " + d + "/spec.json --out " + d + "/ds"), 0);
    write("ok.json", R"({"codec": {"method": "RGB", "target_size": 32}, "train": {"epochs": 1}})");
    EXPECT_EQ(run("encode --manifest " + d + "/ds/manifest.json --config " + d + "/ok.json --out " + d + "/enc"), 0);
    EXPECT_EQ(run("train --index " + d + "/enc/index.csv --config " + d + "/ok.json --out " + d + "/run"), 0);

    write("bad.json", R"({"codec": {"method": "nope"}})");
    EXPECT_EQ(run("encode --manifest " + d + "/ds/manifest.json --config " + d + "/bad.json --out " + d + "/x"), 2);
    EXPECT_EQ(run("encode --manifest " + d + "/missing.json --out " + d + "/x"), 2);
    EXPECT_EQ(run("frobnicate"), 2);

    write("bad.csv", "x\n1\nzz\n");
    write("m.json", R"({"files": [{"path": "bad.csv", "label": "a"}], "grouping": "per_file",
                        "schema": [{"name": "s", "columns": ["x"]}]})");
    EXPECT_EQ(run("encode --manifest " + d + "/m.json --out " + d + "/y"), 3);

    write("hot.json", R"({"codec": {"method": "RGB", "target_size": 32}, "train": {"epochs": 2, "lr": 1e200}})");
    EXPECT_EQ(run("train --index " + d + "/enc/index.csv --config " + d + "/hot.json --out " + d + "/hot"), 4);

    ::setenv("DFHC_SEED", "not-a-number", 1);
    EXPECT_EQ(run("train --index " + d + "/enc/index.csv --config " + d + "/ok.json --out " + d + "/run2"), 2);
    ::unsetenv("DFHC_SEED");
}
