#include "gpsampling/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "gpsampling/io.hpp"
#include "gpsampling/plots.hpp"

namespace gpsampling {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string pm(const MeanStd& m) { return fixed2(m.mean) + " ± " + fixed2(m.std); }

// Scenarios in order of first appearance, each with its summaries.
std::vector<std::pair<Scenario, std::vector<const ExperimentSummary*>>> by_scenario(
    const std::vector<ExperimentSummary>& summaries) {
    std::vector<std::pair<Scenario, std::vector<const ExperimentSummary*>>> out;
    for (const auto& s : summaries) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& e) { return e.first == s.scenario; });
        if (it == out.end()) {
            out.push_back({s.scenario, {}});
            it = std::prev(out.end());
        }
        it->second.push_back(&s);
    }
    return out;
}

// Both baselines share one localization column.
std::string summary_column(const ExperimentSummary& s) {
    return s.variant == "HT" || s.variant == "RW" ? "Baseline" : s.variant;
}

// Localization columns: every variant label in order of first appearance.
std::vector<std::string> localization_columns(const std::vector<ExperimentSummary>& summaries) {
    std::vector<std::string> cols;
    for (const auto& s : summaries) {
        const auto c = summary_column(s);
        if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    }
    return cols;
}

// Standard variants in table order, then custom names, then the baselines.
int variant_rank(const std::string& name) {
    static const std::vector<std::string> order{"MaxMean", "Alpha75", "Alpha50", "Alpha25", "MaxVar", "MaxVarMaxMean"};
    const auto it = std::find(order.begin(), order.end(), name);
    if (it != order.end()) return static_cast<int>(it - order.begin());
    return name == "HT" || name == "RW" ? 100 : 50;
}

std::string accuracy_text(const std::optional<double>& a) { return a ? fixed2(*a) : "n/a"; }

json mean_std_json(const MeanStd& m) { return {{"mean", m.mean}, {"std", m.std}}; }

}  // namespace

std::vector<RunOutcome> execute_runs(const std::vector<RunSpec>& runs, int jobs, const RunCallback& on_done) {
    std::vector<RunOutcome> outcomes(runs.size());
    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;
    std::size_t done = 0;

    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= runs.size()) return;
            RunOutcome& out = outcomes[i];
            out.spec = runs[i];
            try {
                out.log = run_trial(runs[i].config, runs[i].seed);
            } catch (const std::exception& e) {
                out.error = e.what();
            }
            const std::lock_guard lock(done_mutex);
            ++done;
            if (on_done) on_done(out, done, runs.size());
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, jobs));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, runs.size()); ++t) pool.emplace_back(worker);
    }
    return outcomes;
}

std::vector<ExperimentSummary> summarize_logs(const std::vector<TrialLog>& logs) {
    std::vector<std::pair<std::pair<Scenario, std::string>, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < logs.size(); ++i) {
        const auto key = std::make_pair(logs[i].config.scenario, logs[i].config.variant.name);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {}});
            it = std::prev(groups.end());
        }
        it->second.push_back(i);
    }
    std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
        const auto ka = std::make_tuple(a.first.first, variant_rank(a.first.second), a.first.second);
        const auto kb = std::make_tuple(b.first.first, variant_rank(b.first.second), b.first.second);
        return ka < kb;
    });
    const auto checkpoints = default_checkpoints();
    std::vector<ExperimentSummary> out;
    for (const auto& g : groups) {
        std::vector<TrialLog> members;
        members.reserve(g.second.size());
        for (const auto i : g.second) members.push_back(logs[i]);
        out.push_back(aggregate(members, checkpoints));
    }
    return out;
}

void write_mapping_table(const std::vector<ExperimentSummary>& summaries, std::ostream& out) {
    out << "scenario,variant,Samples,RMSE,Variance,Cumulative Distance\n";
    for (const auto& s : summaries) {
        out << to_string(s.scenario) << ',' << s.variant << ',' << pm(s.samples) << ',' << pm(s.rmse) << ','
            << pm(s.variance) << ',' << pm(s.distance) << '\n';
    }
}

void write_localization_table(const std::vector<ExperimentSummary>& summaries, std::ostream& out) {
    const auto cols = localization_columns(summaries);
    out << "scenario,checkpoint";
    for (const auto& c : cols) out << ',' << c;
    out << '\n';
    const auto checkpoints = default_checkpoints();
    for (const auto& [scenario, group] : by_scenario(summaries)) {
        for (std::size_t k = 0; k < checkpoints.size(); ++k) {
            out << to_string(scenario) << ',' << checkpoints[k].label;
            for (const auto& c : cols) {
                const auto it = std::find_if(group.begin(), group.end(),
                                             [&](const ExperimentSummary* s) { return summary_column(*s) == c; });
                out << ',' << (it == group.end() ? std::string{} : accuracy_text((*it)->localization[k].accuracy));
            }
            out << '\n';
        }
    }
}

void write_summary_markdown(const std::vector<ExperimentSummary>& summaries, std::ostream& out) {
    const auto checkpoints = default_checkpoints();
    for (const auto& [scenario, group] : by_scenario(summaries)) {
        out << "## " << to_string(scenario) << "\n\n";
        out << "| Variant | Trials | Samples | RMSE | Variance | Cumulative Distance |\n";
        out << "|---|---|---|---|---|---|\n";
        for (const auto* s : group) {
            out << "| " << s->variant << " | " << s->trials << " | " << pm(s->samples) << " | " << pm(s->rmse) << " | "
                << pm(s->variance) << " | " << pm(s->distance) << " |\n";
        }
        out << "\nSource localization accuracy (%)\n\n| Checkpoint |";
        for (const auto* s : group) out << ' ' << s->variant << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < group.size(); ++i) out << "---|";
        out << '\n';
        for (std::size_t k = 0; k < checkpoints.size(); ++k) {
            out << "| " << checkpoints[k].label << " |";
            for (const auto* s : group) out << ' ' << accuracy_text(s->localization[k].accuracy) << " |";
            out << '\n';
        }
        out << '\n';
    }
}

void write_summary_files(const std::vector<ExperimentSummary>& summaries, const fs::path& dir) {
    fs::create_directories(dir);
    const auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("mapping.csv");
        write_mapping_table(summaries, f);
    }
    {
        auto f = open("localization.csv");
        write_localization_table(summaries, f);
    }
    {
        auto f = open("summary.md");
        write_summary_markdown(summaries, f);
    }
    json rows = json::array();
    for (const auto& s : summaries) {
        json loc = json::array();
        for (const auto& a : s.localization) {
            loc.push_back({{"checkpoint", a.label}, {"logs", a.logs}, {"accuracy", a.accuracy ? json(*a.accuracy) : json()}});
        }
        rows.push_back({{"scenario", std::string(to_string(s.scenario))},
                        {"variant", s.variant},
                        {"trials", s.trials},
                        {"samples", mean_std_json(s.samples)},
                        {"rmse", mean_std_json(s.rmse)},
                        {"variance", mean_std_json(s.variance)},
                        {"cumulative_distance", mean_std_json(s.distance)},
                        {"localization", loc}});
    }
    auto f = open("summary.json");
    f << json{{"schema", "gpsampling.summary/1"}, {"summaries", rows}}.dump(1) << '\n';
}

std::vector<TrialLog> load_logs(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<TrialLog> logs;
    for (const auto& p : files) {
        std::ifstream in(p, std::ios::binary);
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw std::runtime_error(p.string() + ": " + e.what());
        }
        if (j.is_object() && j.value("schema", std::string{}) == kTrialLogSchema) {
            try {
                logs.push_back(trial_log_from_json(j));
            } catch (const std::exception& e) {
                throw std::runtime_error(p.string() + ": " + e.what());
            }
        }
    }
    return logs;
}

int run_experiment(const ExperimentManifest& manifest, std::ostream& status) {
    const fs::path runs_dir = manifest.output / "runs";
    try {
        fs::create_directories(runs_dir);
    } catch (const fs::filesystem_error& e) {
        status << "error: cannot create output directory: " << e.what() << '\n';
        return 2;
    }

    const auto runs = manifest.expand();
    status << "running " << runs.size() << " runs on " << manifest.jobs << " worker(s)\n";
    std::size_t failures = 0;
    auto outcomes = execute_runs(runs, manifest.jobs, [&](const RunOutcome& o, std::size_t done, std::size_t total) {
        std::string err = o.error;
        if (o.log) {
            try {
                write_trial_files(*o.log, runs_dir, o.spec.stem);
            } catch (const std::exception& e) {
                err = e.what();
            }
        }
        if (!err.empty()) ++failures;
        status << '[' << done << '/' << total << "] " << o.spec.stem;
        if (err.empty()) {
            status << " samples " << o.log->sample_count() << '\n';
        } else {
            status << " FAILED: " << err << '\n';
        }
        status.flush();
    });

    std::vector<TrialLog> logs;
    for (auto& o : outcomes) {
        if (o.log) logs.push_back(std::move(*o.log));
    }
    if (!logs.empty()) {
        const auto summaries = summarize_logs(logs);
        try {
            write_summary_files(summaries, manifest.output / "summary");
            write_summary_markdown(summaries, status);
            if (manifest.plots) emit_plots(logs, manifest.output / "plots", manifest.heatmaps);
        } catch (const std::exception& e) {
            status << "error: " << e.what() << '\n';
            return 2;
        }
    }
    if (failures > 0) {
        status << failures << " of " << runs.size() << " runs failed\n";
        return 1;
    }
    return 0;
}

}  // namespace gpsampling
