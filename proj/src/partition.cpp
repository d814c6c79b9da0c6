#include "gpsampling/partition.hpp"

#include <stdexcept>
#include <string>

namespace gpsampling {

Partition voronoi_assign(const GridSpec& grid, std::span<const Point2> sites) {
    if (sites.empty()) throw std::invalid_argument("voronoi partition needs at least one site");
    for (const auto& s : sites) {
        if (!grid.contains(s)) throw std::invalid_argument("voronoi site lies outside the grid");
    }
    Partition p;
    p.sites.assign(sites.begin(), sites.end());
    p.assignment.resize(grid.cell_count());
    for (CellId c = 0; c < grid.cell_count(); ++c) {
        const Point2 q = grid.center(c);
        int owner = 0;
        double best = squared_distance(q, sites[0]);
        for (std::size_t i = 1; i < sites.size(); ++i) {
            const double d = squared_distance(q, sites[i]);
            if (d < best) {
                best = d;
                owner = static_cast<int>(i);
            }
        }
        p.assignment[c] = owner;
    }
    return p;
}

std::vector<CellId> region_mask(const Partition& p, int robot_id) {
    if (robot_id < 0 || static_cast<std::size_t>(robot_id) >= p.sites.size()) {
        throw std::out_of_range("robot id " + std::to_string(robot_id) + " is not part of the partition");
    }
    std::vector<CellId> cells;
    for (CellId c = 0; c < p.assignment.size(); ++c) {
        if (p.assignment[c] == robot_id) cells.push_back(c);
    }
    return cells;
}

PartitionTracker::PartitionTracker(GridSpec grid, PartitionMode mode, std::span<const Point2> initial_sites)
    : grid_(std::move(grid)), mode_(mode), current_(voronoi_assign(grid_, initial_sites)) {}

const Partition& PartitionTracker::update(std::span<const Point2> positions) {
    if (mode_ == PartitionMode::dynamic) current_ = voronoi_assign(grid_, positions);
    return current_;
}

}  // namespace gpsampling
