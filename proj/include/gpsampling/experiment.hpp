#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gpsampling/manifest.hpp"
#include "gpsampling/sim_engine.hpp"

namespace gpsampling {

struct RunOutcome {
    RunSpec spec;
    std::optional<TrialLog> log;  // empty when the run failed
    std::string error;
};

/// Called after each finished run (serialized; never concurrently).
using RunCallback = std::function<void(const RunOutcome&, std::size_t done, std::size_t total)>;

/// Executes runs on up to `jobs` worker threads. Outcomes come back in the
/// order of `runs`, whatever the completion order.
std::vector<RunOutcome> execute_runs(const std::vector<RunSpec>& runs, int jobs, const RunCallback& on_done = {});

/// Groups logs by (scenario, variant) and aggregates each group at the
/// default checkpoints. Scenarios come in HT, RW, FVP, DVP order; variants
/// in the standard table order, custom names alphabetically, baselines last.
std::vector<ExperimentSummary> summarize_logs(const std::vector<TrialLog>& logs);

/// Mapping table: scenario, variant, then Samples, RMSE, Variance and
/// Cumulative Distance as "mean ± std".
void write_mapping_table(const std::vector<ExperimentSummary>& summaries, std::ostream& out);
/// Localization table: one row per checkpoint and scenario, one column per variant.
void write_localization_table(const std::vector<ExperimentSummary>& summaries, std::ostream& out);
void write_summary_markdown(const std::vector<ExperimentSummary>& summaries, std::ostream& out);

/// Writes mapping.csv, localization.csv, summary.md and summary.json into `dir`.
void write_summary_files(const std::vector<ExperimentSummary>& summaries, const std::filesystem::path& dir);

/// Loads every trial JSON below `dir`, sorted by path.
std::vector<TrialLog> load_logs(const std::filesystem::path& dir);

/// Runs the whole manifest: per-run CSV/JSON under <output>/runs, summary
/// tables under <output>/summary and plots under <output>/plots. Returns 0
/// when every run succeeded.
int run_experiment(const ExperimentManifest& manifest, std::ostream& status);

}  // namespace gpsampling
