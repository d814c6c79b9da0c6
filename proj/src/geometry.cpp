#include "gpsampling/geometry.hpp"

#include <stdexcept>
#include <string>

namespace gpsampling {

namespace {

std::size_t cells_along(double extent, double pitch, const char* what) {
    const double ratio = extent / pitch;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument(std::string("grid ") + what + " must be a positive multiple of the cell pitch");
    }
    return static_cast<std::size_t>(rounded);
}

// Index of the nearest center along one axis; half-way ties go down.
std::size_t nearest_index(double coord, double pitch) { return static_cast<std::size_t>(std::ceil(coord / pitch - 0.5)); }

}  // namespace

GridSpec::GridSpec(double width, double height, double pitch) : width_(width), height_(height), pitch_(pitch) {
    if (!(pitch > 0.0) || !std::isfinite(pitch)) throw std::invalid_argument("grid pitch must be positive");
    columns_ = cells_along(width, pitch, "width");
    rows_ = cells_along(height, pitch, "height");
    centers_.reserve(cell_count());
    for (CellId id = 0; id < cell_count(); ++id) centers_.push_back(center(id));
}

bool GridSpec::contains(const Point2& p) const {
    const double half = 0.5 * pitch_;
    const double tol = 1e-9 * pitch_;
    return p.x >= -half - tol && p.y >= -half - tol && p.x <= width_ - half + tol && p.y <= height_ - half + tol;
}

CellId GridSpec::nearest_cell(const Point2& p) const {
    if (!contains(p)) {
        throw std::out_of_range("location (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                ") lies outside the grid");
    }
    const std::size_t column = std::min(nearest_index(std::max(p.x, 0.0), pitch_), columns_ - 1);
    const std::size_t row = std::min(nearest_index(std::max(p.y, 0.0), pitch_), rows_ - 1);
    return cell_id(column, row);
}

double GridSpec::diagonal() const {
    const double dx = static_cast<double>(columns_ - 1) * pitch_;
    const double dy = static_cast<double>(rows_ - 1) * pitch_;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace gpsampling
