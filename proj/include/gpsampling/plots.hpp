#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gpsampling/sim_engine.hpp"

namespace gpsampling {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Standalone SVG document with axes, ticks, one polyline per series and a legend.
std::string render_svg(const LineChart& chart);

enum class Metric { rmse, mean_variance, cumulative_distance };

/// Seed-averaged metric of one (scenario, variant) group against simulated
/// time, sampled every `step` seconds from the first time every log has a
/// record until the longest log ends.
Series average_series(const std::vector<const TrialLog*>& logs, Metric metric, double step);

/// Per scenario, one chart each for RMSE, mean variance and cumulative
/// distance, one series per variant. With `heatmaps`, also the ground truth,
/// predicted mean and variance maps of each group's first log. Returns the
/// files written.
std::vector<std::filesystem::path> emit_plots(const std::vector<TrialLog>& logs, const std::filesystem::path& dir,
                                              bool heatmaps = false);

}  // namespace gpsampling
