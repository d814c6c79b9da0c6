#include "gpsampling/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace gpsampling {

std::vector<Point2> sweep_waypoints(const GridSpec& grid, const Point2& start, double row_spacing) {
    if (!(row_spacing > 0.0)) throw std::invalid_argument("row spacing must be positive");
    const CellId start_cell = grid.nearest_cell(start);
    const auto row_step = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(row_spacing / grid.pitch())));
    const std::size_t columns = grid.columns();

    // begin at whichever row end is closer; ties go to the left
    const double mid = 0.5 * static_cast<double>(columns - 1) * grid.pitch();
    bool left_to_right = start.x <= mid;

    std::vector<Point2> out;
    for (std::size_t row = grid.row_of(start_cell); row < grid.rows(); row += row_step) {
        for (std::size_t k = 0; k < columns; ++k) {
            const std::size_t column = left_to_right ? k : columns - 1 - k;
            out.push_back(grid.center(grid.cell_id(column, row)));
        }
        left_to_right = !left_to_right;
    }
    return out;
}

Point2 random_walk_step(const Point2& pos, const GridSpec& grid, int step_cells, Rng& rng, const CellFilter& allowed) {
    if (step_cells < 1) throw std::invalid_argument("random walk step must be at least one cell");
    const CellId here = grid.nearest_cell(pos);
    const auto column = static_cast<long>(grid.column_of(here));
    const auto row = static_cast<long>(grid.row_of(here));

    // up, down, left, right
    std::array<std::array<long, 2>, 4> moves{{{0, step_cells}, {0, -step_cells}, {-step_cells, 0}, {step_cells, 0}}};
    std::size_t remaining = moves.size();
    while (remaining > 0) {
        std::uniform_int_distribution<std::size_t> pick(0, remaining - 1);
        const std::size_t i = pick(rng);
        const long c = column + moves[i][0];
        const long r = row + moves[i][1];
        std::swap(moves[i], moves[remaining - 1]);
        --remaining;
        if (c < 0 || r < 0 || c >= static_cast<long>(grid.columns()) || r >= static_cast<long>(grid.rows())) continue;
        const CellId next = grid.cell_id(static_cast<std::size_t>(c), static_cast<std::size_t>(r));
        if (allowed && !allowed(next)) continue;
        return grid.center(next);
    }
    return grid.center(here);
}

RobotState advance(RobotState state, const Point2& target) {
    if (state.exhausted) return state;
    const double d = distance(state.position, target);
    const double cost = d / state.speed + state.sample_time;
    if (state.time_used + cost > state.budget) {
        state.exhausted = true;
        return state;
    }
    state.position = target;
    state.cumulative_distance += d;
    state.time_used += cost;
    ++state.samples_taken;
    return state;
}

}  // namespace gpsampling
