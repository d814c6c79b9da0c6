#pragma once

#include <span>
#include <vector>

#include "gpsampling/geometry.hpp"

namespace gpsampling {

/// Nearest-site (Voronoi) assignment of grid cells to robots. Robot ids are
/// the indices into `sites`.
struct Partition {
    std::vector<int> assignment;  // robot id per cell
    std::vector<Point2> sites;

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Assigns every cell to its nearest site; equidistant cells go to the lowest id.
Partition voronoi_assign(const GridSpec& grid, std::span<const Point2> sites);

/// Cells owned by `robot_id`, ascending. Throws std::out_of_range for an unknown id.
std::vector<CellId> region_mask(const Partition& p, int robot_id);

enum class PartitionMode { fixed, dynamic };

/// Fixed mode keeps the partition of the initial sites for the whole trial;
/// dynamic mode recomputes it from the current positions on every request.
class PartitionTracker {
public:
    PartitionTracker(GridSpec grid, PartitionMode mode, std::span<const Point2> initial_sites);

    /// Partition in force for a target request made with robots at `positions`.
    const Partition& update(std::span<const Point2> positions);
    const Partition& current() const { return current_; }
    PartitionMode mode() const { return mode_; }

private:
    GridSpec grid_;
    PartitionMode mode_;
    Partition current_;
};

}  // namespace gpsampling
