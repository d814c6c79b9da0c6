#include <doctest.h>

#include <array>
#include <cmath>
#include <set>

#include "gpsampling/planner.hpp"

using namespace gpsampling;

TEST_CASE("unit-spacing sweep visits every cell once through adjacent moves") {
    const GridSpec g;
    const auto w = sweep_waypoints(g, {4.5, 0.0}, 1.0);
    REQUIRE(w.size() == 150);
    std::set<CellId> seen;
    for (const auto& p : w) {
        CHECK(g.contains(p));
        seen.insert(g.nearest_cell(p));
        CHECK(g.center(g.nearest_cell(p)) == p);
    }
    CHECK(seen.size() == g.cell_count());
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(distance(w[i - 1], w[i]) == doctest::Approx(1.0));
    CHECK(w.front().y == 0.0);
}

TEST_CASE("wider row spacing skips rows and stays on the grid") {
    const GridSpec g;
    const auto w = sweep_waypoints(g, {4.5, 0.0}, 3.0);
    std::set<double> rows;
    for (const auto& p : w) {
        CHECK(g.contains(p));
        rows.insert(p.y);
    }
    CHECK(rows == std::set<double>{0.0, 3.0, 6.0, 9.0, 12.0});
    CHECK(w.size() == 5 * 10);
}

TEST_CASE("degenerate grid sweep") {
    const GridSpec one(1.0, 1.0, 1.0);
    const auto w = sweep_waypoints(one, {0.0, 0.0}, 1.0);
    REQUIRE(w.size() == 1);
    CHECK(w.front() == Point2{0.0, 0.0});
}

TEST_CASE("random walk moves three pitches and respects the bounds") {
    const GridSpec g;
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        const Point2 p = random_walk_step({4.0, 7.0}, g, 3, rng);
        CHECK(distance(p, {4.0, 7.0}) == doctest::Approx(3.0));
    }
    for (int i = 0; i < 200; ++i) {
        const Point2 p = random_walk_step({0.0, 0.0}, g, 3, rng);
        CHECK((p == Point2{3.0, 0.0} || p == Point2{0.0, 3.0}));
    }
    Point2 p{4.5, 0.0};
    for (int i = 0; i < 500; ++i) {
        p = random_walk_step(p, g, 3, rng);
        REQUIRE(g.contains(p));
        CHECK(g.center(g.nearest_cell(p)) == p);
    }
}

TEST_CASE("random walk directions are uniform away from walls") {
    const GridSpec big(101.0, 101.0, 1.0);
    const Point2 center{50.0, 50.0};
    Rng rng(2024);
    std::array<int, 4> counts{};
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
        const Point2 p = random_walk_step(center, big, 3, rng);
        if (p.y > center.y) ++counts[0];
        else if (p.y < center.y) ++counts[1];
        else if (p.x > center.x) ++counts[2];
        else ++counts[3];
    }
    double chi2 = 0.0;
    for (int c : counts) {
        const double f = static_cast<double>(c) / draws;
        CHECK(f >= 0.23);
        CHECK(f <= 0.27);
        chi2 += (c - draws / 4.0) * (c - draws / 4.0) / (draws / 4.0);
    }
    CHECK(chi2 < 11.34);  // 3 degrees of freedom, 1% level
}

TEST_CASE("walk filter and dead ends") {
    const GridSpec g;
    Rng rng(3);
    const CellFilter only_right = [&](CellId c) { return g.center(c).x > 4.0; };
    for (int i = 0; i < 50; ++i) CHECK(random_walk_step({4.0, 7.0}, g, 3, rng, only_right) == Point2{7.0, 7.0});
    const CellFilter nothing = [](CellId) { return false; };
    CHECK(random_walk_step({4.2, 7.1}, g, 3, rng, nothing) == Point2{4.0, 7.0});
}

TEST_CASE("advance accounting") {
    RobotState r;
    r.position = {1.0, 1.0};
    const auto stay = advance(r, {1.0, 1.0});
    CHECK(stay.cumulative_distance == 0.0);
    CHECK(stay.time_used == doctest::Approx(1.0));
    CHECK(stay.samples_taken == 1);

    const auto moved = advance(r, {4.0, 1.0});
    CHECK(moved.time_used == doctest::Approx(4.0));
    CHECK(moved.cumulative_distance == doctest::Approx(3.0));
    CHECK(moved.position == Point2{4.0, 1.0});

    RobotState tight = r;
    tight.time_used = tight.budget - 10.0;
    const auto stuck = advance(tight, {12.0, 1.0});
    CHECK(stuck.exhausted);
    CHECK(stuck.position == tight.position);
    CHECK(stuck.time_used == tight.time_used);
    CHECK(stuck.samples_taken == tight.samples_taken);
}
