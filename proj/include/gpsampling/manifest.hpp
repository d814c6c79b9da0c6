#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpsampling/sim_engine.hpp"

namespace gpsampling {

/// Malformed or inconsistent manifest. The message carries line context
/// when the problem can be pinned to a line.
class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One fully specified run of the experiment matrix.
struct RunSpec {
    ScenarioConfig config;
    std::size_t source_index = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::string stem;  // file name stem of the run's outputs
};

struct ExperimentManifest {
    std::vector<Scenario> scenarios;
    /// Variant templates; "Baseline" resolves per scenario (HT sweep or RW walk).
    std::vector<InfoVariant> variants;
    std::vector<Point2> sources;
    int trials = 5;
    std::uint64_t seed = 1;
    std::filesystem::path output = "results";
    int jobs = 1;
    bool plots = true;
    bool heatmaps = false;

    /// Shared settings; scenario, variant, source and starts are filled per run.
    ScenarioConfig base;
    Point2 single_start{4.5, 0.0};
    int single_initial_samples = 15;
    std::vector<Point2> multi_starts{{3.0, 2.0}, {3.0, 10.0}, {7.0, 7.0}};
    int multi_initial_samples = 5;

    /// scenarios x variants x sources x trials runs, in that nesting order.
    /// Trial t at source s uses seed + s * trials + t, shared by every
    /// scenario and variant so that comparisons are paired.
    std::vector<RunSpec> expand() const;
    std::size_t run_count() const { return scenarios.size() * variants.size() * sources.size() * static_cast<std::size_t>(trials); }
};

/// Keys a manifest must set.
const std::vector<std::string>& required_manifest_keys();

ExperimentManifest parse_manifest_text(const std::string& text, const std::string& origin = "<manifest>");
ExperimentManifest parse_manifest(const std::filesystem::path& path);

/// The full experiment matrix: 4 scenarios, 7 variants, 5 sources, 5 trials.
ExperimentManifest full_matrix_manifest();

/// The variant a manifest entry means in a given scenario.
InfoVariant resolve_variant(const InfoVariant& v, Scenario s);

}  // namespace gpsampling
