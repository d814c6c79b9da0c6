#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpsampling/sim_engine.hpp"

using namespace gpsampling;

namespace {

ScenarioConfig rw_config(const char* variant) {
    auto cfg = ScenarioConfig::defaults(Scenario::RW, InfoVariant::from_name(variant));
    return cfg;
}

TrialLog make_log(Scenario s, const std::string& variant, std::vector<bool> correct) {
    TrialLog log;
    log.config.scenario = s;
    log.config.variant.name = variant;
    for (std::size_t i = 0; i < correct.size(); ++i) {
        StepRecord r;
        r.step = i;
        r.time = static_cast<double>(i);
        r.localization_correct = correct[i];
        r.rmse = 2.0;
        r.mean_variance = 1.0;
        r.cumulative_distance = static_cast<double>(i);
        log.records.push_back(r);
    }
    return log;
}

}  // namespace

TEST_CASE("scenario names and defaults") {
    for (auto s : {Scenario::HT, Scenario::RW, Scenario::FVP, Scenario::DVP}) {
        CHECK(scenario_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS(scenario_from_string("XX"), std::invalid_argument);
    CHECK(ScenarioConfig::defaults(Scenario::HT).starts == std::vector<Point2>{{4.5, 0.0}});
    CHECK(ScenarioConfig::defaults(Scenario::DVP).robots() == 3);
    CHECK(ScenarioConfig::defaults(Scenario::FVP).initial_samples == 5);
}

TEST_CASE("configuration validation") {
    auto cfg = ScenarioConfig::defaults(Scenario::FVP);
    cfg.starts.resize(1);
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = ScenarioConfig::defaults(Scenario::HT);
    cfg.starts.push_back({1.0, 1.0});
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = ScenarioConfig::defaults(Scenario::RW, InfoVariant::sweep());
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = ScenarioConfig::defaults(Scenario::HT, InfoVariant::random_walk());
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = ScenarioConfig::defaults(Scenario::HT);
    cfg.starts = {{30.0, 0.0}};
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(ScenarioConfig::defaults(Scenario::HT, InfoVariant::sweep())));
}

TEST_CASE("a budget below one sample leaves no adaptive steps") {
    for (auto s : {Scenario::HT, Scenario::RW, Scenario::DVP}) {
        auto cfg = ScenarioConfig::defaults(s);
        cfg.budget = 0.5;
        const auto log = run_trial(cfg, 1);
        CHECK(std::none_of(log.records.begin(), log.records.end(), [](const StepRecord& r) { return r.adaptive; }));
        CHECK(log.records.empty());
    }
}

TEST_CASE("identical config and seed give identical logs") {
    auto cfg = rw_config("Alpha50");
    cfg.budget = 120.0;
    const auto a = run_trial(cfg, 17);
    const auto b = run_trial(cfg, 17);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].position == b.records[i].position);
        CHECK(a.records[i].value == b.records[i].value);
        CHECK(a.records[i].rmse == b.records[i].rmse);
        CHECK(a.records[i].hyper == b.records[i].hyper);
    }
    CHECK(a.final_prediction.mean == b.final_prediction.mean);
    CHECK(run_trial(cfg, 18).records.front().value != a.records.front().value);
}

TEST_CASE("MaxVar beats the random walk on map variance at equal time") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto adaptive = run_trial(rw_config("MaxVar"), seed);
        const auto walk = run_trial(rw_config("RW"), seed);
        REQUIRE(!adaptive.records.empty());
        REQUIRE(!walk.records.empty());
        const double t = std::min(adaptive.records.back().time, walk.records.back().time);
        const auto* a = record_at_time(adaptive, t);
        const auto* w = record_at_time(walk, t);
        REQUIRE(a != nullptr);
        REQUIRE(w != nullptr);
        if (a->mean_variance < w->mean_variance) ++wins;
    }
    CHECK(wins >= 4);
}

TEST_CASE("rmse and mean variance closed forms") {
    const GridSpec g(2.0, 1.0, 1.0);
    const GroundTruthField truth(g, FieldParams{}, 0, {-50.0, -60.0});
    Eigen::VectorXd pred(2);
    pred << -50.0, -60.0;
    CHECK(rmse(pred, truth) == 0.0);
    pred << -48.0, -58.0;
    CHECK(rmse(pred, truth) == doctest::Approx(2.0));
    pred << -47.0, -64.0;
    CHECK(rmse(pred, truth) == doctest::Approx(3.5355).epsilon(1e-4));

    Eigen::VectorXd var(2);
    var << 2.0, 4.0;
    CHECK(mean_variance(var) == doctest::Approx(3.0));
    CHECK(mean_variance(Eigen::VectorXd::Constant(150, 7.5)) == doctest::Approx(7.5));
}

TEST_CASE("localization within one meter") {
    const GridSpec fine(10.0, 15.0, 0.1);
    const auto n = static_cast<Eigen::Index>(fine.cell_count());
    Eigen::VectorXd mean = Eigen::VectorXd::Constant(n, -80.0);
    mean[static_cast<Eigen::Index>(fine.nearest_cell({4.6, 7.3}))] = -30.0;
    CHECK(localization_correct(mean, fine, {4.0, 7.0}));

    const GridSpec g;
    Eigen::VectorXd coarse = Eigen::VectorXd::Constant(150, -80.0);
    coarse[static_cast<Eigen::Index>(g.cell_id(4, 7))] = -30.0;
    CHECK(localization_correct(coarse, g, {4.0, 7.0}));
    coarse.setConstant(-80.0);
    coarse[static_cast<Eigen::Index>(g.cell_id(6, 7))] = -30.0;
    CHECK_FALSE(localization_correct(coarse, g, {4.0, 7.0}));
}

TEST_CASE("aggregation") {
    const auto cps = default_checkpoints();
    REQUIRE(cps.size() == 7);
    CHECK(cps.back().label == "After last sample");

    const std::vector<TrialLog> one{make_log(Scenario::RW, "MaxVar", std::vector<bool>(30, true))};
    const auto s1 = aggregate(one, cps);
    CHECK(s1.rmse.std == 0.0);
    CHECK(s1.samples.mean == 30.0);
    CHECK(*s1.localization[0].accuracy == 100.0);
    CHECK(!s1.localization[2].accuracy);  // 35 samples never reached
    CHECK(*s1.localization.back().accuracy == 100.0);

    std::vector<TrialLog> logs;
    for (int i = 0; i < 25; ++i) logs.push_back(make_log(Scenario::RW, "MaxVar", std::vector<bool>(12, i < 17)));
    CHECK(*aggregate(logs, cps).localization[0].accuracy == doctest::Approx(68.0));

    CHECK(mean_std(std::vector<double>{1.0, 3.0}).std == doctest::Approx(std::sqrt(2.0)));
    CHECK_THROWS_AS(aggregate(std::vector<TrialLog>{}, cps), std::invalid_argument);
    logs.push_back(make_log(Scenario::HT, "MaxVar", {true}));
    CHECK_THROWS_AS(aggregate(logs, cps), std::invalid_argument);
}

TEST_CASE("seed streams are distinct") {
    CHECK(derive_seed(1, 1) != derive_seed(1, 2));
    CHECK(derive_seed(1, 1) != derive_seed(2, 1));
    CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}
