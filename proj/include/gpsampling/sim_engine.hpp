#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gpsampling/acquisition.hpp"
#include "gpsampling/geometry.hpp"
#include "gpsampling/gp_regression.hpp"
#include "gpsampling/partition.hpp"
#include "gpsampling/planner.hpp"
#include "gpsampling/signal_field.hpp"

namespace gpsampling {

enum class Scenario { HT, RW, FVP, DVP };

std::string_view to_string(Scenario s);
/// Throws std::invalid_argument for anything but HT, RW, FVP, DVP.
Scenario scenario_from_string(std::string_view s);
bool is_multi_robot(Scenario s);

struct GpSettings {
    int refit_every = 10;
    int restarts = 3;
    int max_iterations = 100;
    double gradient_tolerance = 1e-5;
    double length_scale_min = 0.1;
};

/// Everything needed to run one trial except the seed.
struct ScenarioConfig {
    Scenario scenario = Scenario::HT;
    InfoVariant variant = InfoVariant::max_var();
    FieldParams field;
    GridSpec grid;
    double budget = 500.0;      // seconds per robot
    double speed = 1.0;         // m/s
    double sample_time = 1.0;   // s
    std::vector<Point2> starts;  // one per robot
    /// Random-walk samples per robot before adaptive selection (RW, FVP, DVP).
    int initial_samples = 15;
    int walk_step_cells = 3;
    /// Row spacing of the HT sweep, meters.
    double sweep_row_spacing = 3.0;
    GpSettings gp;

    std::size_t robots() const { return starts.size(); }

    /// Defaults for a scenario: single robot at (4.5, 0) with 15 initial
    /// samples, or three robots at (3,2), (3,10), (7,7) with 5 each.
    static ScenarioConfig defaults(Scenario s, InfoVariant variant = InfoVariant::max_var());
};

/// Throws std::invalid_argument on inconsistent settings (robot count vs
/// scenario, baseline kind vs scenario, bad weights, off-grid starts, ...).
void validate(const ScenarioConfig& cfg);

struct StepRecord {
    std::size_t step = 0;
    double time = 0.0;
    int robot_id = 0;
    Point2 position;
    double value = 0.0;
    double rmse = 0.0;
    double mean_variance = 0.0;
    double cumulative_distance = 0.0;  // summed over robots
    bool localization_correct = false;
    bool adaptive = false;  // target chosen by the information function
    Hyperparams hyper;      // GP hyperparameters after this sample
};

struct TrialLog {
    ScenarioConfig config;
    std::uint64_t seed = 0;
    std::vector<StepRecord> records;
    Prediction final_prediction;
    std::vector<RobotState> robots;

    std::size_t sample_count() const { return records.size(); }
};

/// A target choice made by a robot, reported to an optional observer.
struct SelectionEvent {
    double time = 0.0;  // simulated time of the decision
    int robot_id = 0;
    std::vector<Point2> positions;  // every robot's position at that time
    const Partition* partition = nullptr;  // region split in force; null for single-robot runs
    Point2 target;
    bool adaptive = false;
};

using SelectionObserver = std::function<void(const SelectionEvent&)>;

/// Runs one trial to completion. A pure function of (cfg, seed).
TrialLog run_trial(const ScenarioConfig& cfg, std::uint64_t seed, const SelectionObserver& observer = {});

/// Seed of an independent random stream derived from a trial seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// The ground truth run_trial(cfg, seed) measures.
GroundTruthField trial_field(const ScenarioConfig& cfg, std::uint64_t seed);

double rmse(const Eigen::VectorXd& predicted_mean, const GroundTruthField& truth);
double mean_variance(const Eigen::VectorXd& variances);
/// True when the cell with the largest predicted mean (lowest id on ties)
/// lies within 1 m of the source.
bool localization_correct(const Eigen::VectorXd& predicted_mean, const GridSpec& grid, const Point2& source);

/// Last record at or before time t; nullptr if none.
const StepRecord* record_at_time(const TrialLog& log, double t);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for one value
};

MeanStd mean_std(std::span<const double> values);

struct Checkpoint {
    enum class Kind { samples, half, last };
    Kind kind = Kind::samples;
    std::size_t samples = 0;
    std::string label;
};

/// 10, 25, 35, 45, 50 samples, after half the samples, after the last one.
std::vector<Checkpoint> default_checkpoints();

struct CheckpointAccuracy {
    std::string label;
    /// Percentage of logs localizing correctly; empty when no log reaches the checkpoint.
    std::optional<double> accuracy;
    std::size_t logs = 0;  // logs that reached the checkpoint
};

struct ExperimentSummary {
    Scenario scenario = Scenario::HT;
    std::string variant;
    std::size_t trials = 0;
    MeanStd samples;
    MeanStd rmse;
    MeanStd variance;
    MeanStd distance;
    std::vector<CheckpointAccuracy> localization;
};

/// Summarizes logs sharing one (scenario, variant). Throws on an empty list
/// or on mixed scenarios/variants.
ExperimentSummary aggregate(std::span<const TrialLog> logs, std::span<const Checkpoint> checkpoints);

}  // namespace gpsampling
