#include "gpsampling/signal_field.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include "gpsampling/text_format.hpp"

namespace gpsampling {

namespace {

double log_of(double v, LogBase base) { return base == LogBase::natural ? std::log(v) : std::log10(v); }

}  // namespace

double FieldParams::reference_power() const {
    const double wavelength = kSpeedOfLight / frequency;
    return tx_power + 20.0 * log_of(wavelength / (4.0 * std::numbers::pi), log_base);
}

void validate(const FieldParams& p, const GridSpec& grid) {
    if (!(p.frequency > 0.0)) throw std::invalid_argument("frequency must be positive");
    if (!(p.path_loss_exponent > 0.0)) throw std::invalid_argument("path loss exponent must be positive");
    if (!(p.shadowing_variance >= 0.0)) throw std::invalid_argument("shadowing variance must be non-negative");
    if (!grid.contains(p.source)) throw std::invalid_argument("signal source lies outside the grid");
}

double rss_mean(double d, const FieldParams& p) {
    const double clamped = std::max(d, kMinSourceDistance);
    return p.reference_power() - 10.0 * p.path_loss_exponent * log_of(clamped, p.log_base);
}

GroundTruthField::GroundTruthField(GridSpec grid, FieldParams params, std::uint64_t seed, std::vector<double> values)
    : grid_(std::move(grid)), params_(params), seed_(seed), values_(std::move(values)) {
    if (values_.size() != grid_.cell_count()) throw std::invalid_argument("field needs one value per cell");
}

double GroundTruthField::noiseless(CellId id) const { return rss_mean(distance(grid_.center(id), params_.source), params_); }

double GroundTruthField::measure(const Point2& location) const { return values_[grid_.nearest_cell(location)]; }

void GroundTruthField::write_csv(std::ostream& out) const {
    out << "x,y,value\n";
    for (CellId id = 0; id < grid_.cell_count(); ++id) {
        const Point2 c = grid_.center(id);
        out << format_number(c.x) << ',' << format_number(c.y) << ',' << format_number(values_[id]) << '\n';
    }
}

GroundTruthField generate(const GridSpec& grid, const FieldParams& p, std::uint64_t seed) {
    validate(p, grid);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const double sigma = std::sqrt(p.shadowing_variance);
    std::vector<double> values(grid.cell_count());
    for (CellId id = 0; id < grid.cell_count(); ++id) {
        values[id] = rss_mean(distance(grid.center(id), p.source), p) + sigma * unit(rng);
    }
    return {grid, p, seed, std::move(values)};
}

}  // namespace gpsampling
