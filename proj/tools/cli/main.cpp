// dfhc: encode sensor CSV data as images, train the classifier, compare codings.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfhc/error.hpp"
#include "dfhc_app/commands.hpp"
#include "dfhc_app/text.hpp"

namespace fs = std::filesystem;
using namespace dfhc;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kData = 3, kDivergence = 4 };

int run(int argc, char** argv) {
    CLI::App app{"Multi-cluster time-series to image coding and CNN classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "dfhc 0.1.0");

    fs::path manifest, config_path, out, index, spec;
    std::vector<fs::path> runs;
    std::size_t threads = 1;
    bool threads_given = false;

    auto* encode = app.add_subcommand("encode", "Encode a CSV dataset into PNG images plus index.csv");
    encode->add_option("--manifest", manifest, "Dataset manifest (JSON)")->required()->check(CLI::ExistingFile);
    encode->add_option("--config", config_path, "Run config (JSON); defaults to RGB at 64x64")->check(CLI::ExistingFile);
    encode->add_option("--out", out, "Output directory")->required();
    encode->add_option("--threads", threads, "Encoder threads, 0 = all cores (overrides the config)")
        ->each([&](const std::string&) { threads_given = true; });

    auto* train = app.add_subcommand("train", "Split 7:1:2, train the CNN and report test metrics");
    train->add_option("--index", index, "index.csv written by encode")->required()->check(CLI::ExistingFile);
    train->add_option("--config", config_path, "Run config (JSON)")->check(CLI::ExistingFile);
    train->add_option("--out", out, "Output directory")->required();

    auto* compare = app.add_subcommand("compare", "Tabulate test accuracy across training runs");
    compare->add_option("--runs", runs, "Run directories holding report.json")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--out", out, "Directory for comparison.csv and comparison.txt");

    auto* synth = app.add_subcommand("synth", "Generate a synthetic CSV dataset with its manifest");
    synth->add_option("--spec", spec, "Synthetic spec (JSON)")->required()->check(CLI::ExistingFile);
    synth->add_option("--out", out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    if (*encode) {
        app::RunConfig config = app::load_config(config_path);
        app::apply_seed_override(config);
        if (threads_given) config.threads = threads;
        const auto summary = app::cmd_encode(app::load_manifest(manifest), config, out, std::cerr);
        std::cout << summary.index_path.string() << '\n';
        return summary.failed == 0 ? kOk : kData;
    }
    if (*train) {
        app::RunConfig config = app::load_config(config_path);
        app::apply_seed_override(config);
        app::cmd_train(index, config, out, std::cerr);
        std::cout << app::read_text_file(out / "summary.txt");
        return kOk;
    }
    if (*compare) {
        const auto rows = app::compare_runs(runs, std::cerr);
        const std::string text = app::comparison_text(rows);
        if (!out.empty()) {
            app::write_text_file(out / "comparison.csv", app::comparison_csv(rows));
            app::write_text_file(out / "comparison.txt", text);
        }
        std::cout << text;
        return kOk;
    }
    if (*synth) {
        app::SynthSpec s = app::synth_spec_from_json(app::read_json_file(spec));
        std::cout << app::cmd_synth(s, out, std::cerr).string() << '\n';
        return kOk;
    }
    return kConfig;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "dfhc: config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "dfhc: " << e.what() << '\n';
        return kDivergence;
    } catch (const Error& e) {
        std::cerr << "dfhc: data error: " << e.what() << '\n';
        return kData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "dfhc: " << e.what() << '\n';
        return kData;
    }
}
