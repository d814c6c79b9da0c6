#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gpsampling {

/// A location in the plane, in meters.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double squared_distance(const Point2& a, const Point2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(const Point2& a, const Point2& b) { return std::sqrt(squared_distance(a, b)); }

/// Strict lexicographic order on (x, y).
inline bool lex_less(const Point2& a, const Point2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
}

using CellId = std::size_t;

/// Rectangular workspace discretized into square cells.
///
/// Cell centers sit at integer multiples of the pitch, so with the default
/// 10 m x 15 m area at 1 m pitch the centers are (0..9, 0..14) and the
/// covered region is [-pitch/2, width - pitch/2] x [-pitch/2, height - pitch/2].
/// Cells are numbered column-major, which makes ascending CellId coincide
/// with lexicographic (x, then y) order of the centers.
class GridSpec {
public:
    GridSpec() : GridSpec(10.0, 15.0, 1.0) {}
    GridSpec(double width, double height, double pitch);

    double width() const { return width_; }
    double height() const { return height_; }
    double pitch() const { return pitch_; }
    std::size_t columns() const { return columns_; }
    std::size_t rows() const { return rows_; }
    std::size_t cell_count() const { return columns_ * rows_; }

    CellId cell_id(std::size_t column, std::size_t row) const { return column * rows_ + row; }
    std::size_t column_of(CellId id) const { return id / rows_; }
    std::size_t row_of(CellId id) const { return id % rows_; }

    Point2 center(CellId id) const {
        return {static_cast<double>(column_of(id)) * pitch_, static_cast<double>(row_of(id)) * pitch_};
    }
    const std::vector<Point2>& centers() const { return centers_; }

    bool contains(const Point2& p) const;

    /// Nearest cell center; exact half-way ties resolve to the lower index.
    /// Throws std::out_of_range when p lies outside the covered region.
    CellId nearest_cell(const Point2& p) const;

    /// Length of the diagonal between the first and last cell centers.
    double diagonal() const;

    friend bool operator==(const GridSpec& a, const GridSpec& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.pitch_ == b.pitch_;
    }

private:
    double width_;
    double height_;
    double pitch_;
    std::size_t columns_;
    std::size_t rows_;
    std::vector<Point2> centers_;
};

}  // namespace gpsampling
