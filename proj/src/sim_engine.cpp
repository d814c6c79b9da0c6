#include "gpsampling/sim_engine.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "gpsampling/partition.hpp"

namespace gpsampling {

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::HT: return "HT";
        case Scenario::RW: return "RW";
        case Scenario::FVP: return "FVP";
        case Scenario::DVP: return "DVP";
    }
    return "?";
}

Scenario scenario_from_string(std::string_view s) {
    if (s == "HT") return Scenario::HT;
    if (s == "RW") return Scenario::RW;
    if (s == "FVP") return Scenario::FVP;
    if (s == "DVP") return Scenario::DVP;
    throw std::invalid_argument("unknown scenario '" + std::string(s) + "'");
}

bool is_multi_robot(Scenario s) { return s == Scenario::FVP || s == Scenario::DVP; }

ScenarioConfig ScenarioConfig::defaults(Scenario s, InfoVariant variant) {
    ScenarioConfig cfg;
    cfg.scenario = s;
    cfg.variant = std::move(variant);
    if (is_multi_robot(s)) {
        cfg.starts = {{3.0, 2.0}, {3.0, 10.0}, {7.0, 7.0}};
        cfg.initial_samples = 5;
    } else {
        cfg.starts = {{4.5, 0.0}};
        cfg.initial_samples = 15;
    }
    return cfg;
}

void validate(const ScenarioConfig& cfg) {
    validate(cfg.field, cfg.grid);
    validate(cfg.variant);
    if (cfg.starts.empty()) throw std::invalid_argument("at least one robot start is required");
    if (is_multi_robot(cfg.scenario) && cfg.starts.size() < 2) {
        throw std::invalid_argument(std::string(to_string(cfg.scenario)) + " scenario needs at least two robots");
    }
    if (!is_multi_robot(cfg.scenario) && cfg.starts.size() != 1) {
        throw std::invalid_argument(std::string(to_string(cfg.scenario)) + " scenario takes exactly one robot");
    }
    for (const auto& s : cfg.starts) {
        if (!cfg.grid.contains(s)) throw std::invalid_argument("robot start lies outside the grid");
    }
    if (cfg.variant.kind == VariantKind::sweep_baseline && cfg.scenario != Scenario::HT) {
        throw std::invalid_argument("the sweep baseline belongs to the HT scenario");
    }
    if (cfg.variant.kind == VariantKind::random_walk_baseline && cfg.scenario == Scenario::HT) {
        throw std::invalid_argument("the HT scenario's baseline is the sweep");
    }
    if (!(cfg.budget >= 0.0)) throw std::invalid_argument("budget must be non-negative");
    if (!(cfg.speed > 0.0)) throw std::invalid_argument("speed must be positive");
    if (!(cfg.sample_time > 0.0)) throw std::invalid_argument("sample time must be positive");
    if (cfg.initial_samples < 0) throw std::invalid_argument("initial sample count must be non-negative");
    if (cfg.walk_step_cells < 1) throw std::invalid_argument("walk step must be at least one cell");
    if (!(cfg.sweep_row_spacing > 0.0)) throw std::invalid_argument("sweep row spacing must be positive");
    if (cfg.gp.refit_every < 1) throw std::invalid_argument("refit interval must be at least one sample");
    if (cfg.gp.restarts < 0 || cfg.gp.max_iterations < 0) throw std::invalid_argument("bad optimizer settings");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

enum Stream : std::uint64_t { kFieldStream = 1, kWalkStream = 2, kFitStream = 3 };

}  // namespace

GroundTruthField trial_field(const ScenarioConfig& cfg, std::uint64_t seed) {
    return generate(cfg.grid, cfg.field, derive_seed(seed, kFieldStream));
}

namespace {

// The shared GP map and its refit schedule.
class MapEstimator {
public:
    MapEstimator(const ScenarioConfig& cfg, std::uint64_t seed)
        : grid_(cfg.grid), settings_(cfg.gp), fit_seed_(derive_seed(seed, kFitStream)),
          model_(TrainingSet{}, Hyperparams{}) {
        prediction_ = model_.predict(grid_.centers());
    }

    void add(const Point2& q, double z) {
        training_.add(q, z);
        const std::size_t n = training_.size();
        if (n >= 2 && (last_fit_ == 0 || n - last_fit_ >= static_cast<std::size_t>(settings_.refit_every))) {
            if (last_fit_ == 0) hyper_ = initial_guess();
            FitOptions opts;
            opts.restarts = settings_.restarts;
            opts.max_iterations = settings_.max_iterations;
            opts.gradient_tolerance = settings_.gradient_tolerance;
            opts.length_scale_min = settings_.length_scale_min;
            opts.length_scale_max = std::max(grid_.diagonal(), settings_.length_scale_min);
            opts.seed = derive_seed(fit_seed_, n);
            hyper_ = fit(training_, hyper_, opts);
            last_fit_ = n;
        }
        rebuild();
    }

    const Prediction& prediction() const { return prediction_; }
    const Hyperparams& hyper() const { return hyper_; }

private:
    Hyperparams initial_guess() const {
        const auto& z = training_.observations;
        double mean = 0.0;
        for (double v : z) mean += v;
        mean /= static_cast<double>(z.size());
        double var = 0.0;
        for (double v : z) var += (v - mean) * (v - mean);
        var = std::max(var / static_cast<double>(z.size() - 1), 1e-3);
        return {var, std::max(2.0 * grid_.pitch(), settings_.length_scale_min), std::max(0.01 * var, kNoiseVarianceFloor)};
    }

    void rebuild() {
        for (;;) {
            try {
                model_ = GpModel(training_, hyper_);
                break;
            } catch (const FactorizationError&) {
                hyper_.noise_variance *= 10.0;
            }
        }
        prediction_ = model_.predict(grid_.centers());
    }

    GridSpec grid_;
    GpSettings settings_;
    std::uint64_t fit_seed_;
    TrainingSet training_;
    Hyperparams hyper_;
    std::size_t last_fit_ = 0;
    GpModel model_;
    Prediction prediction_;
};

// A committed move: the robot leaves `from` at `depart`, reaches `target`
// after `leg / speed` seconds and finishes measuring at `arrival`.
struct Pending {
    bool active = false;
    bool adaptive = false;
    Point2 from;
    Point2 target;
    double depart = 0.0;
    double travel = 0.0;
    double arrival = 0.0;
    double leg = 0.0;
};

class TrialRunner {
public:
    TrialRunner(const ScenarioConfig& cfg, std::uint64_t seed, const SelectionObserver& observer)
        : cfg_(cfg), observer_(observer), field_(trial_field(cfg, seed)),
          walk_rng_(derive_seed(seed, kWalkStream)), map_(cfg, seed),
          partition_(cfg.grid, cfg.scenario == Scenario::DVP ? PartitionMode::dynamic : PartitionMode::fixed,
                     cfg.starts) {
        log_.config = cfg;
        log_.seed = seed;
        for (std::size_t i = 0; i < cfg.starts.size(); ++i) {
            RobotState r;
            r.id = static_cast<int>(i);
            r.position = cfg.starts[i];
            r.speed = cfg.speed;
            r.sample_time = cfg.sample_time;
            r.budget = cfg.budget;
            robots_.push_back(r);
            traveled_.push_back(0.0);
            initial_left_.push_back(cfg.initial_samples);
        }
        pending_.resize(robots_.size());
        if (cfg.scenario == Scenario::HT) {
            sweep_ = sweep_waypoints(cfg.grid, cfg.starts.front(), cfg.sweep_row_spacing);
            initial_left_.front() = static_cast<int>(sweep_.size());
        }
        all_cells_.resize(cfg.grid.cell_count());
        for (CellId c = 0; c < all_cells_.size(); ++c) all_cells_[c] = c;
    }

    TrialLog run() {
        for (auto& r : robots_) plan(r);
        for (;;) {
            int next = -1;
            for (std::size_t i = 0; i < pending_.size(); ++i) {
                if (!pending_[i].active) continue;
                if (next < 0 || pending_[i].arrival < pending_[static_cast<std::size_t>(next)].arrival) {
                    next = static_cast<int>(i);
                }
            }
            if (next < 0) break;
            now_ = pending_[static_cast<std::size_t>(next)].arrival;
            arrive(robots_[static_cast<std::size_t>(next)]);
        }
        log_.final_prediction = map_.prediction();
        log_.robots = robots_;
        return std::move(log_);
    }

private:
    // Where every robot is at the current time; robots in transit are
    // placed along their straight-line leg.
    std::vector<Point2> positions() const {
        std::vector<Point2> out;
        out.reserve(robots_.size());
        for (std::size_t i = 0; i < robots_.size(); ++i) {
            const Pending& p = pending_[i];
            if (!p.active) {
                out.push_back(robots_[i].position);
                continue;
            }
            const double f = p.travel > 0.0 ? std::clamp((now_ - p.depart) / p.travel, 0.0, 1.0) : 1.0;
            out.push_back({p.from.x + f * (p.target.x - p.from.x), p.from.y + f * (p.target.y - p.from.y)});
        }
        return out;
    }

    Point2 walk_from(const RobotState& r) {
        if (!is_multi_robot(cfg_.scenario)) return random_walk_step(r.position, cfg_.grid, cfg_.walk_step_cells, walk_rng_);
        const Partition& p = partition_.update(positions());
        const int id = r.id;
        return random_walk_step(r.position, cfg_.grid, cfg_.walk_step_cells, walk_rng_,
                                [&p, id](CellId c) { return p.assignment[c] == id; });
    }

    Point2 sweep_point(std::size_t k) const {
        const std::size_t n = sweep_.size();
        if (n == 1) return sweep_.front();
        const std::size_t period = 2 * (n - 1);
        const std::size_t i = k % period;
        return sweep_[i < n ? i : period - i];
    }

    // Chooses the robot's next target and commits to it, or retires the robot.
    void plan(RobotState& r) {
        const auto idx = static_cast<std::size_t>(r.id);
        Pending& p = pending_[idx];
        p.active = false;
        if (r.exhausted) return;

        Point2 target;
        bool adaptive = false;
        const auto& kind = cfg_.variant.kind;
        if (kind == VariantKind::sweep_baseline) {
            target = sweep_point(sweep_step_++);
        } else if (kind == VariantKind::random_walk_baseline) {
            target = walk_from(r);
        } else if (initial_left_[idx] > 0) {
            if (cfg_.scenario == Scenario::HT) {
                target = sweep_[sweep_.size() - static_cast<std::size_t>(initial_left_[idx])];
            } else {
                target = walk_from(r);
            }
            --initial_left_[idx];
        } else {
            std::span<const CellId> region = all_cells_;
            std::vector<CellId> mask;
            if (is_multi_robot(cfg_.scenario)) {
                mask = region_mask(partition_.update(positions()), r.id);
                region = mask;
            }
            target = cfg_.grid.center(select_target(cfg_.variant, map_.prediction(), cfg_.grid, region, r.position));
            adaptive = true;
        }

        if (observer_) {
            SelectionEvent e;
            e.time = now_;
            e.robot_id = r.id;
            e.positions = positions();
            e.partition = is_multi_robot(cfg_.scenario) ? &partition_.current() : nullptr;
            e.target = target;
            e.adaptive = adaptive;
            observer_(e);
        }

        const Point2 from = r.position;
        const double start = r.time_used;
        r = advance(r, target);
        if (r.exhausted) return;
        const double leg = distance(from, target);
        p = {true, adaptive, from, target, start, leg / r.speed, r.time_used, leg};
    }

    void arrive(RobotState& r) {
        Pending& p = pending_[static_cast<std::size_t>(r.id)];
        p.active = false;
        traveled_[static_cast<std::size_t>(r.id)] += p.leg;

        const double z = field_.measure(p.target);
        map_.add(p.target, z);
        const Prediction& pred = map_.prediction();

        StepRecord rec;
        rec.step = log_.records.size();
        rec.time = p.arrival;
        rec.robot_id = r.id;
        rec.position = p.target;
        rec.value = z;
        rec.rmse = rmse(pred.mean, field_);
        rec.mean_variance = mean_variance(pred.variance);
        for (double d : traveled_) rec.cumulative_distance += d;
        rec.localization_correct = localization_correct(pred.mean, cfg_.grid, cfg_.field.source);
        rec.adaptive = p.adaptive;
        rec.hyper = map_.hyper();
        log_.records.push_back(rec);

        plan(r);
    }

    const ScenarioConfig& cfg_;
    const SelectionObserver& observer_;
    double now_ = 0.0;
    GroundTruthField field_;
    Rng walk_rng_;
    MapEstimator map_;
    PartitionTracker partition_;
    std::vector<RobotState> robots_;
    std::vector<Pending> pending_;
    std::vector<double> traveled_;
    std::vector<int> initial_left_;
    std::vector<Point2> sweep_;
    std::size_t sweep_step_ = 0;
    std::vector<CellId> all_cells_;
    TrialLog log_;
};

}  // namespace

TrialLog run_trial(const ScenarioConfig& cfg, std::uint64_t seed, const SelectionObserver& observer) {
    validate(cfg);
    return TrialRunner(cfg, seed, observer).run();
}

}  // namespace gpsampling
