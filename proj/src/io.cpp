#include "gpsampling/io.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "gpsampling/text_format.hpp"

namespace gpsampling {

using nlohmann::json;

namespace {

json point(const Point2& p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

std::string kind_name(VariantKind k) {
    switch (k) {
        case VariantKind::weighted: return "weighted";
        case VariantKind::max_var_max_mean: return "max_var_max_mean";
        case VariantKind::sweep_baseline: return "sweep_baseline";
        case VariantKind::random_walk_baseline: return "random_walk_baseline";
    }
    return "?";
}

VariantKind kind_from(const std::string& s) {
    if (s == "weighted") return VariantKind::weighted;
    if (s == "max_var_max_mean") return VariantKind::max_var_max_mean;
    if (s == "sweep_baseline") return VariantKind::sweep_baseline;
    if (s == "random_walk_baseline") return VariantKind::random_walk_baseline;
    throw std::runtime_error("unknown variant kind '" + s + "'");
}

json hyper_json(const Hyperparams& h) {
    return {{"signal_variance", h.signal_variance}, {"length_scale", h.length_scale}, {"noise_variance", h.noise_variance}};
}

Hyperparams hyper_from(const json& j) {
    return {j.at("signal_variance").get<double>(), j.at("length_scale").get<double>(),
            j.at("noise_variance").get<double>()};
}

json vector_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vector_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_step_csv(const TrialLog& log, std::ostream& out) {
    out << kStepCsvHeader << '\n';
    for (const auto& r : log.records) {
        out << r.step << ',' << format_number(r.time) << ',' << r.robot_id << ',' << format_number(r.position.x) << ','
            << format_number(r.position.y) << ',' << format_number(r.value) << ',' << format_number(r.rmse) << ','
            << format_number(r.mean_variance) << ',' << format_number(r.cumulative_distance) << ','
            << (r.localization_correct ? 1 : 0) << '\n';
    }
}

json to_json(const ScenarioConfig& cfg) {
    json starts = json::array();
    for (const auto& s : cfg.starts) starts.push_back(point(s));
    const auto& v = cfg.variant;
    const auto& f = cfg.field;
    return {
        {"scenario", std::string(to_string(cfg.scenario))},
        {"variant",
         {{"name", v.name},
          {"kind", kind_name(v.kind)},
          {"alpha", v.alpha},
          {"beta", v.beta},
          {"variance_threshold", v.variance_threshold},
          {"allow_custom_weights", v.allow_custom_weights}}},
        {"field",
         {{"tx_power", f.tx_power},
          {"frequency", f.frequency},
          {"path_loss_exponent", f.path_loss_exponent},
          {"shadowing_variance", f.shadowing_variance},
          {"source", point(f.source)},
          {"log_base", f.log_base == LogBase::natural ? "natural" : "base10"}}},
        {"grid", {{"width", cfg.grid.width()}, {"height", cfg.grid.height()}, {"pitch", cfg.grid.pitch()}}},
        {"budget", cfg.budget},
        {"speed", cfg.speed},
        {"sample_time", cfg.sample_time},
        {"starts", starts},
        {"initial_samples", cfg.initial_samples},
        {"walk_step_cells", cfg.walk_step_cells},
        {"sweep_row_spacing", cfg.sweep_row_spacing},
        {"gp",
         {{"refit_every", cfg.gp.refit_every},
          {"restarts", cfg.gp.restarts},
          {"max_iterations", cfg.gp.max_iterations},
          {"gradient_tolerance", cfg.gp.gradient_tolerance},
          {"length_scale_min", cfg.gp.length_scale_min}}},
    };
}

ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig cfg;
    cfg.scenario = scenario_from_string(j.at("scenario").get<std::string>());
    const auto& v = j.at("variant");
    cfg.variant.name = v.at("name").get<std::string>();
    cfg.variant.kind = kind_from(v.at("kind").get<std::string>());
    cfg.variant.alpha = v.at("alpha").get<double>();
    cfg.variant.beta = v.at("beta").get<double>();
    cfg.variant.variance_threshold = v.at("variance_threshold").get<double>();
    cfg.variant.allow_custom_weights = v.at("allow_custom_weights").get<bool>();
    const auto& f = j.at("field");
    cfg.field.tx_power = f.at("tx_power").get<double>();
    cfg.field.frequency = f.at("frequency").get<double>();
    cfg.field.path_loss_exponent = f.at("path_loss_exponent").get<double>();
    cfg.field.shadowing_variance = f.at("shadowing_variance").get<double>();
    cfg.field.source = point_from(f.at("source"));
    cfg.field.log_base = f.at("log_base").get<std::string>() == "base10" ? LogBase::base10 : LogBase::natural;
    const auto& g = j.at("grid");
    cfg.grid = GridSpec(g.at("width").get<double>(), g.at("height").get<double>(), g.at("pitch").get<double>());
    cfg.budget = j.at("budget").get<double>();
    cfg.speed = j.at("speed").get<double>();
    cfg.sample_time = j.at("sample_time").get<double>();
    cfg.starts.clear();
    for (const auto& s : j.at("starts")) cfg.starts.push_back(point_from(s));
    cfg.initial_samples = j.at("initial_samples").get<int>();
    cfg.walk_step_cells = j.at("walk_step_cells").get<int>();
    cfg.sweep_row_spacing = j.at("sweep_row_spacing").get<double>();
    const auto& gp = j.at("gp");
    cfg.gp.refit_every = gp.at("refit_every").get<int>();
    cfg.gp.restarts = gp.at("restarts").get<int>();
    cfg.gp.max_iterations = gp.at("max_iterations").get<int>();
    cfg.gp.gradient_tolerance = gp.at("gradient_tolerance").get<double>();
    cfg.gp.length_scale_min = gp.at("length_scale_min").get<double>();
    return cfg;
}

json to_json(const TrialLog& log) {
    json records = json::array();
    for (const auto& r : log.records) {
        records.push_back({{"step", r.step},
                           {"time", r.time},
                           {"robot_id", r.robot_id},
                           {"position", point(r.position)},
                           {"value", r.value},
                           {"rmse", r.rmse},
                           {"mean_variance", r.mean_variance},
                           {"cumulative_distance", r.cumulative_distance},
                           {"localization_correct", r.localization_correct},
                           {"adaptive", r.adaptive},
                           {"hyper", hyper_json(r.hyper)}});
    }
    json robots = json::array();
    for (const auto& r : log.robots) {
        robots.push_back({{"id", r.id},
                          {"position", point(r.position)},
                          {"cumulative_distance", r.cumulative_distance},
                          {"samples_taken", r.samples_taken},
                          {"time_used", r.time_used},
                          {"speed", r.speed},
                          {"sample_time", r.sample_time},
                          {"budget", r.budget},
                          {"exhausted", r.exhausted}});
    }
    return {{"schema", kTrialLogSchema},
            {"seed", log.seed},
            {"config", to_json(log.config)},
            {"sample_count", log.sample_count()},
            {"records", records},
            {"final_prediction",
             {{"mean", vector_json(log.final_prediction.mean)}, {"variance", vector_json(log.final_prediction.variance)}}},
            {"robots", robots}};
}

TrialLog trial_log_from_json(const json& j) {
    if (j.value("schema", std::string{}) != kTrialLogSchema) {
        throw std::runtime_error("not a trial log (expected schema " + std::string(kTrialLogSchema) + ")");
    }
    TrialLog log;
    log.seed = j.at("seed").get<std::uint64_t>();
    log.config = config_from_json(j.at("config"));
    for (const auto& r : j.at("records")) {
        StepRecord rec;
        rec.step = r.at("step").get<std::size_t>();
        rec.time = r.at("time").get<double>();
        rec.robot_id = r.at("robot_id").get<int>();
        rec.position = point_from(r.at("position"));
        rec.value = r.at("value").get<double>();
        rec.rmse = r.at("rmse").get<double>();
        rec.mean_variance = r.at("mean_variance").get<double>();
        rec.cumulative_distance = r.at("cumulative_distance").get<double>();
        rec.localization_correct = r.at("localization_correct").get<bool>();
        rec.adaptive = r.at("adaptive").get<bool>();
        rec.hyper = hyper_from(r.at("hyper"));
        log.records.push_back(rec);
    }
    if (j.at("sample_count").get<std::size_t>() != log.records.size()) {
        throw std::runtime_error("trial log sample count disagrees with its records");
    }
    const auto& pred = j.at("final_prediction");
    log.final_prediction.mean = vector_from(pred.at("mean"));
    log.final_prediction.variance = vector_from(pred.at("variance"));
    for (const auto& r : j.at("robots")) {
        RobotState s;
        s.id = r.at("id").get<int>();
        s.position = point_from(r.at("position"));
        s.cumulative_distance = r.at("cumulative_distance").get<double>();
        s.samples_taken = r.at("samples_taken").get<std::size_t>();
        s.time_used = r.at("time_used").get<double>();
        s.speed = r.at("speed").get<double>();
        s.sample_time = r.at("sample_time").get<double>();
        s.budget = r.at("budget").get<double>();
        s.exhausted = r.at("exhausted").get<bool>();
        log.robots.push_back(s);
    }
    return log;
}

void write_trial_files(const TrialLog& log, const std::filesystem::path& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + (dir / (stem + ".csv")).string());
        write_step_csv(log, csv);
        if (!csv) throw std::runtime_error("write failed for " + (dir / (stem + ".csv")).string());
    }
    std::ofstream js(dir / (stem + ".json"), std::ios::binary);
    if (!js) throw std::runtime_error("cannot write " + (dir / (stem + ".json")).string());
    js << to_json(log).dump(1) << '\n';
    if (!js) throw std::runtime_error("write failed for " + (dir / (stem + ".json")).string());
}

TrialLog read_trial_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    try {
        return trial_log_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace gpsampling
