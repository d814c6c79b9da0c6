#include <cmath>
#include <stdexcept>

#include "gpsampling/sim_engine.hpp"

namespace gpsampling {

double rmse(const Eigen::VectorXd& predicted_mean, const GroundTruthField& truth) {
    const auto& values = truth.values();
    if (static_cast<std::size_t>(predicted_mean.size()) != values.size()) {
        throw std::invalid_argument("prediction and ground truth are not aligned");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double e = predicted_mean[static_cast<Eigen::Index>(i)] - values[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(values.size()));
}

double mean_variance(const Eigen::VectorXd& variances) {
    if (variances.size() == 0) throw std::invalid_argument("no variances to average");
    return variances.mean();
}

bool localization_correct(const Eigen::VectorXd& predicted_mean, const GridSpec& grid, const Point2& source) {
    if (static_cast<std::size_t>(predicted_mean.size()) != grid.cell_count()) {
        throw std::invalid_argument("prediction does not cover the grid");
    }
    Eigen::Index best = 0;
    predicted_mean.maxCoeff(&best);  // first maximum, i.e. lowest cell id
    return distance(grid.center(static_cast<CellId>(best)), source) <= 1.0;
}

const StepRecord* record_at_time(const TrialLog& log, double t) {
    const StepRecord* found = nullptr;
    for (const auto& r : log.records) {
        if (r.time > t) break;
        found = &r;
    }
    return found;
}

MeanStd mean_std(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("no values to summarize");
    MeanStd out;
    for (double v : values) out.mean += v;
    out.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return out;
}

std::vector<Checkpoint> default_checkpoints() {
    using K = Checkpoint::Kind;
    return {{K::samples, 10, "10"},       {K::samples, 25, "25"},  {K::samples, 35, "35"},
            {K::samples, 45, "45"},       {K::samples, 50, "50"},  {K::half, 0, "After half samples"},
            {K::last, 0, "After last sample"}};
}

ExperimentSummary aggregate(std::span<const TrialLog> logs, std::span<const Checkpoint> checkpoints) {
    if (logs.empty()) throw std::invalid_argument("cannot aggregate an empty list of logs");
    ExperimentSummary s;
    s.scenario = logs.front().config.scenario;
    s.variant = logs.front().config.variant.name;
    s.trials = logs.size();

    std::vector<double> samples, errors, variances, distances;
    for (const auto& log : logs) {
        if (log.config.scenario != s.scenario || log.config.variant.name != s.variant) {
            throw std::invalid_argument("logs mix scenarios or variants");
        }
        samples.push_back(static_cast<double>(log.sample_count()));
        if (log.records.empty()) {
            errors.push_back(std::nan(""));
            variances.push_back(std::nan(""));
            distances.push_back(0.0);
            continue;
        }
        errors.push_back(log.records.back().rmse);
        variances.push_back(log.records.back().mean_variance);
        distances.push_back(log.records.back().cumulative_distance);
    }
    s.samples = mean_std(samples);
    s.rmse = mean_std(errors);
    s.variance = mean_std(variances);
    s.distance = mean_std(distances);

    for (const auto& cp : checkpoints) {
        CheckpointAccuracy acc;
        acc.label = cp.label;
        std::size_t correct = 0;
        for (const auto& log : logs) {
            const std::size_t n = log.sample_count();
            std::size_t k = 0;
            switch (cp.kind) {
                case Checkpoint::Kind::samples: k = cp.samples; break;
                case Checkpoint::Kind::half: k = (n + 1) / 2; break;
                case Checkpoint::Kind::last: k = n; break;
            }
            if (k == 0 || k > n) continue;
            ++acc.logs;
            if (log.records[k - 1].localization_correct) ++correct;
        }
        if (acc.logs > 0) acc.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(acc.logs);
        s.localization.push_back(acc);
    }
    return s;
}

}  // namespace gpsampling
