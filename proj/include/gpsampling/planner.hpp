#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "gpsampling/geometry.hpp"

namespace gpsampling {

using Rng = std::mt19937_64;

struct RobotState {
    int id = 0;
    Point2 position;
    double cumulative_distance = 0.0;  // meters
    std::size_t samples_taken = 0;
    double time_used = 0.0;            // simulated seconds
    double speed = 1.0;                // m/s
    double sample_time = 1.0;          // seconds per measurement
    double budget = 500.0;             // seconds
    bool exhausted = false;
};

/// Serpentine sweep over rows of cell centers, starting on the row nearest
/// `start` at the row end nearest `start` and climbing by `row_spacing`
/// (rounded to a whole number of cells) until the top of the grid.
std::vector<Point2> sweep_waypoints(const GridSpec& grid, const Point2& start, double row_spacing);

/// Predicate restricting where a walk may land; empty means anywhere on the grid.
using CellFilter = std::function<bool(CellId)>;

/// One random-walk move of `step_cells` cell pitches up, down, left or right.
///
/// `pos` is first snapped to its nearest cell center. Directions are drawn
/// without replacement until one lands on the grid (and passes `allowed`),
/// so the chosen direction is uniform over the feasible ones. Returns the
/// snapped position when no direction is feasible.
Point2 random_walk_step(const Point2& pos, const GridSpec& grid, int step_cells, Rng& rng,
                        const CellFilter& allowed = {});

/// Moves in a straight line to `target` and takes one measurement there.
/// When the move plus measurement would overrun the budget the robot stays
/// put and is marked exhausted.
RobotState advance(RobotState state, const Point2& target);

}  // namespace gpsampling
