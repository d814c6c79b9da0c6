#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gpsampling/geometry.hpp"

namespace gpsampling {

enum class LogBase { natural, base10 };

inline constexpr double kSpeedOfLight = 3.0e8;
inline constexpr double kMinSourceDistance = 0.1;

/// Log-distance path-loss model with Gaussian shadowing.
struct FieldParams {
    double tx_power = 27.0;            // dBm
    double frequency = 2.4e9;          // Hz
    double path_loss_exponent = 3.0;
    double shadowing_variance = 0.65;  // dBm^2
    Point2 source{4.0, 7.0};
    LogBase log_base = LogBase::natural;

    /// Received power at the 1 m reference distance.
    double reference_power() const;
};

/// Throws std::invalid_argument on non-positive frequency or exponent,
/// negative shadowing variance, or a source outside the grid.
void validate(const FieldParams& p, const GridSpec& grid);

/// Noiseless received power at distance d (clamped below at 0.1 m).
double rss_mean(double d, const FieldParams& p);

/// Frozen per-trial ground truth, one value per grid cell.
class GroundTruthField {
public:
    GroundTruthField(GridSpec grid, FieldParams params, std::uint64_t seed, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    const FieldParams& params() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<double>& values() const { return values_; }
    double value(CellId id) const { return values_.at(id); }

    /// Noiseless component at a cell.
    double noiseless(CellId id) const;

    /// Reading at the cell nearest to `location`. Throws std::out_of_range off-grid.
    double measure(const Point2& location) const;

    /// Writes "x,y,value" rows with a header.
    void write_csv(std::ostream& out) const;

private:
    GridSpec grid_;
    FieldParams params_;
    std::uint64_t seed_;
    std::vector<double> values_;
};

GroundTruthField generate(const GridSpec& grid, const FieldParams& p, std::uint64_t seed);

}  // namespace gpsampling
