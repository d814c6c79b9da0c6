#include "gpsampling/acquisition.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gpsampling {

namespace {

constexpr std::array<double, 5> kStandardAlphas{1.0, 0.75, 0.5, 0.25, 0.0};

// Scores within this relative distance of the maximum count as tied. Plateau
// cells (e.g. unexplored cells at the prior variance) differ only by rounding,
// which would otherwise send the robot across the grid for nothing.
constexpr double kTieTolerance = 1e-9;

CellId best_cell(const Eigen::VectorXd& score, const GridSpec& grid, std::span<const CellId> region,
                 const Point2& robot_pos) {
    double top = -std::numeric_limits<double>::infinity();
    for (const CellId c : region) top = std::max(top, score[static_cast<Eigen::Index>(c)]);
    const double cutoff = top - kTieTolerance * std::max(1.0, std::abs(top));

    CellId best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const CellId c : region) {
        if (score[static_cast<Eigen::Index>(c)] < cutoff) continue;
        const double d = squared_distance(grid.center(c), robot_pos);
        // CellId order is lexicographic in (x, y), so the id breaks the last tie
        if (d < best_dist || (d == best_dist && c < best)) {
            best = c;
            best_dist = d;
        }
    }
    return best;
}

}  // namespace

InfoVariant InfoVariant::weighted_variant(double alpha, std::string name) {
    if (name.empty()) name = "Alpha" + std::to_string(static_cast<int>(std::lround(alpha * 100)));
    return {VariantKind::weighted, alpha, 1.0 - alpha, 5.0, false, std::move(name)};
}

InfoVariant InfoVariant::max_var_max_mean(double threshold) {
    return {VariantKind::max_var_max_mean, 0.0, 1.0, threshold, false, "MaxVarMaxMean"};
}

InfoVariant InfoVariant::from_name(std::string_view name) {
    if (name == "MaxMean") return max_mean();
    if (name == "Alpha75") return weighted_variant(0.75);
    if (name == "Alpha50") return weighted_variant(0.5);
    if (name == "Alpha25") return weighted_variant(0.25);
    if (name == "MaxVar") return max_var();
    if (name == "MaxVarMaxMean") return max_var_max_mean();
    if (name == "HT") return sweep();
    if (name == "RW") return random_walk();
    throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void validate(const InfoVariant& v) {
    if (v.kind == VariantKind::max_var_max_mean) {
        if (!(v.variance_threshold >= 0.0)) throw std::invalid_argument("variance threshold must be non-negative");
        return;
    }
    if (v.kind != VariantKind::weighted) return;
    if (!(v.alpha >= 0.0 && v.alpha <= 1.0 && v.beta >= 0.0 && v.beta <= 1.0)) {
        throw std::invalid_argument("alpha and beta must lie in [0, 1]");
    }
    if (std::abs(v.alpha + v.beta - 1.0) > 1e-12) throw std::invalid_argument("alpha + beta must equal 1");
    if (v.allow_custom_weights) return;
    for (const double a : kStandardAlphas) {
        if (std::abs(v.alpha - a) <= 1e-12) return;
    }
    throw std::invalid_argument("alpha/beta is not a standard weight row; set the custom-weights override to use it");
}

Eigen::VectorXd informativeness(const Eigen::VectorXd& mean, const Eigen::VectorXd& variance, double alpha,
                                double beta) {
    if (mean.size() != variance.size()) throw std::invalid_argument("mean and variance maps differ in size");
    return alpha * mean + beta * variance;
}

CellId select_target(const InfoVariant& variant, const Prediction& pred, const GridSpec& grid,
                     std::span<const CellId> region, const Point2& robot_pos) {
    if (variant.is_baseline()) {
        throw std::logic_error("baseline variant '" + variant.name + "' does not use an information function");
    }
    if (region.empty()) throw std::invalid_argument("target region is empty");
    const auto cells = static_cast<Eigen::Index>(grid.cell_count());
    if (pred.mean.size() != cells || pred.variance.size() != cells) {
        throw std::invalid_argument("prediction does not cover the grid");
    }

    if (variant.kind == VariantKind::max_var_max_mean) {
        double total = 0.0;
        for (const CellId c : region) total += pred.variance[static_cast<Eigen::Index>(c)];
        const double mean_var = total / static_cast<double>(region.size());
        return best_cell(mean_var > variant.variance_threshold ? pred.variance : pred.mean, grid, region, robot_pos);
    }
    if (variant.alpha == 0.0) return best_cell(pred.variance, grid, region, robot_pos);
    if (variant.beta == 0.0) return best_cell(pred.mean, grid, region, robot_pos);
    return best_cell(informativeness(pred.mean, pred.variance, variant.alpha, variant.beta), grid, region, robot_pos);
}

}  // namespace gpsampling
