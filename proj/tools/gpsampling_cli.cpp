// Command-line front end for the sampling experiments.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpsampling/experiment.hpp"
#include "gpsampling/io.hpp"
#include "gpsampling/manifest.hpp"
#include "gpsampling/plots.hpp"

namespace fs = std::filesystem;
using namespace gpsampling;

namespace {

int cmd_run(const std::string& path, const std::optional<std::string>& out, const std::optional<int>& jobs,
            const std::optional<std::uint64_t>& seed, bool no_plots) {
    ExperimentManifest m = parse_manifest(path);
    if (out) m.output = *out;
    if (jobs) m.jobs = *jobs;
    if (seed) m.seed = *seed;
    if (no_plots) m.plots = false;
    return run_experiment(m, std::cout);
}

int cmd_summarize(const fs::path& logdir, const std::optional<std::string>& out) {
    const auto logs = load_logs(logdir);
    if (logs.empty()) {
        std::cerr << "no trial logs found under " << logdir << '\n';
        return 1;
    }
    const auto summaries = summarize_logs(logs);
    write_summary_files(summaries, out ? fs::path(*out) : logdir / "summary");
    write_summary_markdown(summaries, std::cout);
    return 0;
}

int cmd_plot(const fs::path& logdir, const std::optional<std::string>& out, bool heatmaps) {
    const auto logs = load_logs(logdir);
    if (logs.empty()) {
        std::cerr << "no trial logs found under " << logdir << '\n';
        return 1;
    }
    for (const auto& p : emit_plots(logs, out ? fs::path(*out) : logdir / "plots", heatmaps)) std::cout << p.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive sampling of a Wi-Fi signal field with Gaussian-process maps"};
    app.require_subcommand(1);

    std::optional<std::string> out;
    std::optional<int> jobs;
    std::optional<std::uint64_t> seed;
    bool no_plots = false;
    std::string manifest_path;
    auto* run = app.add_subcommand("run", "Run every configuration of a manifest");
    run->add_option("manifest", manifest_path, "YAML experiment manifest")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (overrides the manifest)");
    run->add_option("--jobs", jobs, "Worker threads (overrides the manifest)")->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "Base seed (overrides the manifest)");
    run->add_flag("--no-plots", no_plots, "Skip SVG plots");

    std::string logdir;
    bool heatmaps = false;
    auto* plot = app.add_subcommand("plot", "Draw metric charts from trial logs");
    plot->add_option("logdir", logdir, "Directory holding trial JSON logs")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--out", out, "Plot directory (default <logdir>/plots)");
    plot->add_flag("--heatmaps", heatmaps, "Also draw truth, mean and variance maps");

    auto* summarize = app.add_subcommand("summarize", "Rebuild the summary tables from trial logs");
    summarize->add_option("logdir", logdir, "Directory holding trial JSON logs")->required()->check(CLI::ExistingDirectory);
    summarize->add_option("--out", out, "Summary directory (default <logdir>/summary)");

    bool preview = false;
    std::vector<double> source{4.0, 7.0};
    FieldParams field;
    std::string log_base = "natural";
    std::uint64_t field_seed = 1;
    auto* fld = app.add_subcommand("field", "Emit a ground-truth field as CSV (x, y, value)");
    fld->add_flag("--preview", preview, "Write the field CSV")->required();
    fld->add_option("--source", source, "Source position X Y")->expected(2);
    fld->add_option("--exponent", field.path_loss_exponent, "Path-loss exponent");
    fld->add_option("--tx-power", field.tx_power, "Transmit power (dBm)");
    fld->add_option("--shadowing", field.shadowing_variance, "Shadowing variance (dBm^2)");
    fld->add_option("--log-base", log_base, "natural or base10")->check(CLI::IsMember({"natural", "base10"}));
    fld->add_option("--seed", field_seed, "Field seed");
    fld->add_option("--out", out, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(manifest_path, out, jobs, seed, no_plots);
        if (*summarize) return cmd_summarize(logdir, out);
        if (*plot) return cmd_plot(logdir, out, heatmaps);
        if (*fld) {
            field.source = {source[0], source[1]};
            field.log_base = log_base == "base10" ? LogBase::base10 : LogBase::natural;
            const GridSpec grid;
            validate(field, grid);
            const auto truth = generate(grid, field, field_seed);
            if (out) {
                std::ofstream f(*out, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write " + *out);
                truth.write_csv(f);
            } else {
                truth.write_csv(std::cout);
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
