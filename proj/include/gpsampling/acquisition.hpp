#pragma once

#include <span>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "gpsampling/geometry.hpp"
#include "gpsampling/gp_regression.hpp"

namespace gpsampling {

enum class VariantKind { weighted, max_var_max_mean, sweep_baseline, random_walk_baseline };

/// An acquisition policy. Weighted variants score cells with
/// alpha * mean + beta * variance.
struct InfoVariant {
    VariantKind kind = VariantKind::weighted;
    double alpha = 0.0;
    double beta = 1.0;
    double variance_threshold = 5.0;  // dBm^2, max_var_max_mean only
    /// Permits weights outside the standard table (alpha + beta must still be 1).
    bool allow_custom_weights = false;
    std::string name;

    bool is_baseline() const {
        return kind == VariantKind::sweep_baseline || kind == VariantKind::random_walk_baseline;
    }

    static InfoVariant weighted_variant(double alpha, std::string name = {});
    static InfoVariant max_mean() { return weighted_variant(1.0, "MaxMean"); }
    static InfoVariant max_var() { return weighted_variant(0.0, "MaxVar"); }
    static InfoVariant max_var_max_mean(double threshold = 5.0);
    static InfoVariant sweep() { return {VariantKind::sweep_baseline, 0.0, 0.0, 0.0, false, "HT"}; }
    static InfoVariant random_walk() { return {VariantKind::random_walk_baseline, 0.0, 0.0, 0.0, false, "RW"}; }

    /// Resolves the standard names: MaxMean, Alpha75, Alpha50, Alpha25,
    /// MaxVar, MaxVarMaxMean, HT, RW. Throws std::invalid_argument otherwise.
    static InfoVariant from_name(std::string_view name);
};

/// Throws std::invalid_argument when weights are out of range, do not sum
/// to one, or (without allow_custom_weights) are not a standard row.
void validate(const InfoVariant& v);

/// Per-cell alpha * mean + beta * variance.
Eigen::VectorXd informativeness(const Eigen::VectorXd& mean, const Eigen::VectorXd& variance, double alpha,
                                double beta);

/// Chooses the next sampling cell within `region` (cell ids of `grid`).
/// `pred` holds one entry per grid cell. Equal scores resolve to the cell
/// nearest `robot_pos`, then to the lexicographically smallest center.
/// Baseline variants are rejected with std::logic_error.
CellId select_target(const InfoVariant& variant, const Prediction& pred, const GridSpec& grid,
                     std::span<const CellId> region, const Point2& robot_pos);

}  // namespace gpsampling
