#include "gpsampling/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace gpsampling {

namespace {

constexpr const char* kBaseline = "Baseline";

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& what) const {
        std::ostringstream msg;
        msg << origin_;
        if (at.IsDefined() && at.Mark().line >= 0) msg << ":" << at.Mark().line + 1 << ":" << at.Mark().column + 1;
        msg << ": " << what;
        throw ManifestError(msg.str());
    }

    void expect_map(const YAML::Node& n, const std::string& key) const {
        if (!n.IsMap()) fail(n, "'" + key + "' must be a mapping");
    }

    void reject_unknown(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) const {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.contains(key)) {
                std::string list;
                for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
                fail(kv.first, "unknown key '" + key + "' in " + where + " (allowed: " + list + ")");
            }
        }
    }

    template <typename T>
    T scalar(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, "'" + key + "' must be a scalar");
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + key + "' has an invalid value '" + n.Scalar() + "'");
        }
    }

    template <typename T>
    void optional(const YAML::Node& map, const char* key, T& out) const {
        if (const auto n = map[key]) out = scalar<T>(n, key);
    }

    Point2 point(const YAML::Node& n, const std::string& key) const {
        if (!n.IsSequence() || n.size() != 2) fail(n, "'" + key + "' must be a pair [x, y]");
        return {scalar<double>(n[0], key), scalar<double>(n[1], key)};
    }

    std::vector<Point2> points(const YAML::Node& n, const std::string& key) const {
        if (!n.IsSequence() || n.size() == 0) fail(n, "'" + key + "' must be a nonempty list of [x, y] pairs");
        std::vector<Point2> out;
        for (const auto& p : n) out.push_back(point(p, key));
        return out;
    }

private:
    std::string origin_;
};

InfoVariant parse_variant(const Reader& rd, const YAML::Node& n) {
    if (n.IsScalar()) {
        const auto name = n.as<std::string>();
        if (name == kBaseline) return {VariantKind::sweep_baseline, 0.0, 0.0, 0.0, false, kBaseline};
        try {
            return InfoVariant::from_name(name);
        } catch (const std::invalid_argument& e) {
            rd.fail(n, e.what());
        }
    }
    if (!n.IsMap()) rd.fail(n, "a variant is a name or a mapping");
    rd.reject_unknown(n, {"name", "alpha", "beta", "variance_threshold", "allow_custom_weights"}, "variant");
    if (!n["name"]) rd.fail(n, "variant mapping needs a 'name'");
    const auto name = rd.scalar<std::string>(n["name"], "name");

    InfoVariant v;
    if (n["alpha"] || n["beta"]) {
        if (!n["alpha"] || !n["beta"]) rd.fail(n, "variant '" + name + "' must set both alpha and beta");
        v = InfoVariant::weighted_variant(rd.scalar<double>(n["alpha"], "alpha"), name);
        v.beta = rd.scalar<double>(n["beta"], "beta");
    } else {
        try {
            v = InfoVariant::from_name(name);
        } catch (const std::invalid_argument& e) {
            rd.fail(n, std::string(e.what()) + "; custom variants need alpha and beta");
        }
    }
    rd.optional(n, "variance_threshold", v.variance_threshold);
    rd.optional(n, "allow_custom_weights", v.allow_custom_weights);
    try {
        validate(v);
    } catch (const std::invalid_argument& e) {
        rd.fail(n, "variant '" + name + "': " + e.what());
    }
    return v;
}

void check_runs(const Reader& rd, const YAML::Node& root, const ExperimentManifest& m) {
    for (const auto& run : m.expand()) {
        if (run.trial > 0) continue;  // trials differ only by seed
        try {
            validate(run.config);
        } catch (const std::invalid_argument& e) {
            const std::string msg = e.what();
            const char* key = "scenarios";
            if (msg.find("robot") != std::string::npos) {
                key = is_multi_robot(run.config.scenario) ? "multi_robot" : "single_robot";
            } else if (msg.find("source") != std::string::npos) {
                key = "sources";
            }
            rd.fail(root[key] ? root[key] : root, run.stem + ": " + msg);
        }
    }
}

}  // namespace

InfoVariant resolve_variant(const InfoVariant& v, Scenario s) {
    if (v.name != kBaseline) return v;
    return s == Scenario::HT ? InfoVariant::sweep() : InfoVariant::random_walk();
}

std::vector<RunSpec> ExperimentManifest::expand() const {
    std::vector<RunSpec> runs;
    runs.reserve(run_count());
    for (const auto s : scenarios) {
        for (const auto& v : variants) {
            const InfoVariant variant = resolve_variant(v, s);
            for (std::size_t k = 0; k < sources.size(); ++k) {
                for (int t = 0; t < trials; ++t) {
                    RunSpec run;
                    run.config = base;
                    run.config.scenario = s;
                    run.config.variant = variant;
                    run.config.field.source = sources[k];
                    if (is_multi_robot(s)) {
                        run.config.starts = multi_starts;
                        run.config.initial_samples = multi_initial_samples;
                    } else {
                        run.config.starts = {single_start};
                        run.config.initial_samples = single_initial_samples;
                    }
                    run.source_index = k;
                    run.trial = t;
                    run.seed = seed + static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(trials) +
                               static_cast<std::uint64_t>(t);
                    run.stem = std::string(to_string(s)) + "_" + variant.name + "_src" + std::to_string(k) + "_trial" +
                               std::to_string(t);
                    runs.push_back(std::move(run));
                }
            }
        }
    }
    return runs;
}

const std::vector<std::string>& required_manifest_keys() {
    static const std::vector<std::string> keys{"scenarios", "variants", "sources", "trials"};
    return keys;
}

ExperimentManifest parse_manifest_text(const std::string& text, const std::string& origin) {
    const Reader rd(origin);
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream msg;
        msg << origin << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": " << e.msg;
        throw ManifestError(msg.str());
    }

    std::string required;
    for (const auto& k : required_manifest_keys()) required += (required.empty() ? "" : ", ") + k;
    if (root.IsNull() || !root.IsDefined()) throw ManifestError(origin + ": manifest is empty; required keys: " + required);
    if (!root.IsMap()) rd.fail(root, "manifest must be a mapping; required keys: " + required);
    rd.reject_unknown(root,
                      {"scenarios", "variants", "sources", "trials", "seed", "output", "jobs", "plots", "heatmaps",
                       "grid", "field", "robot", "gp", "single_robot", "multi_robot"},
                      "manifest");
    for (const auto& k : required_manifest_keys()) {
        if (!root[k]) rd.fail(root, "missing required key '" + k + "' (required: " + required + ")");
    }

    ExperimentManifest m;

    const auto scen = root["scenarios"];
    if (!scen.IsSequence() || scen.size() == 0) rd.fail(scen, "'scenarios' must be a nonempty list");
    for (const auto& s : scen) {
        try {
            m.scenarios.push_back(scenario_from_string(rd.scalar<std::string>(s, "scenarios")));
        } catch (const std::invalid_argument& e) {
            rd.fail(s, e.what());
        }
    }

    const auto vars = root["variants"];
    if (!vars.IsSequence() || vars.size() == 0) rd.fail(vars, "'variants' must be a nonempty list");
    for (const auto& v : vars) m.variants.push_back(parse_variant(rd, v));

    m.sources = rd.points(root["sources"], "sources");
    m.trials = rd.scalar<int>(root["trials"], "trials");
    if (m.trials < 1) rd.fail(root["trials"], "'trials' must be at least 1");

    rd.optional(root, "seed", m.seed);
    if (const auto n = root["output"]) m.output = rd.scalar<std::string>(n, "output");
    rd.optional(root, "jobs", m.jobs);
    if (m.jobs < 1) rd.fail(root["jobs"], "'jobs' must be at least 1");
    rd.optional(root, "plots", m.plots);
    rd.optional(root, "heatmaps", m.heatmaps);

    if (const auto g = root["grid"]) {
        rd.expect_map(g, "grid");
        rd.reject_unknown(g, {"width", "height", "pitch"}, "grid");
        double w = m.base.grid.width(), h = m.base.grid.height(), p = m.base.grid.pitch();
        rd.optional(g, "width", w);
        rd.optional(g, "height", h);
        rd.optional(g, "pitch", p);
        try {
            m.base.grid = GridSpec(w, h, p);
        } catch (const std::invalid_argument& e) {
            rd.fail(g, e.what());
        }
    }
    if (const auto f = root["field"]) {
        rd.expect_map(f, "field");
        rd.reject_unknown(f, {"tx_power", "frequency", "path_loss_exponent", "shadowing_variance", "log_base"}, "field");
        rd.optional(f, "tx_power", m.base.field.tx_power);
        rd.optional(f, "frequency", m.base.field.frequency);
        rd.optional(f, "path_loss_exponent", m.base.field.path_loss_exponent);
        rd.optional(f, "shadowing_variance", m.base.field.shadowing_variance);
        if (const auto b = f["log_base"]) {
            const auto s = rd.scalar<std::string>(b, "log_base");
            if (s == "natural") {
                m.base.field.log_base = LogBase::natural;
            } else if (s == "base10") {
                m.base.field.log_base = LogBase::base10;
            } else {
                rd.fail(b, "'log_base' must be natural or base10");
            }
        }
    }
    if (const auto r = root["robot"]) {
        rd.expect_map(r, "robot");
        rd.reject_unknown(r, {"budget", "speed", "sample_time", "walk_step_cells", "sweep_row_spacing"}, "robot");
        rd.optional(r, "budget", m.base.budget);
        rd.optional(r, "speed", m.base.speed);
        rd.optional(r, "sample_time", m.base.sample_time);
        rd.optional(r, "walk_step_cells", m.base.walk_step_cells);
        rd.optional(r, "sweep_row_spacing", m.base.sweep_row_spacing);
    }
    if (const auto g = root["gp"]) {
        rd.expect_map(g, "gp");
        rd.reject_unknown(g, {"refit_every", "restarts", "max_iterations", "gradient_tolerance", "length_scale_min"}, "gp");
        rd.optional(g, "refit_every", m.base.gp.refit_every);
        rd.optional(g, "restarts", m.base.gp.restarts);
        rd.optional(g, "max_iterations", m.base.gp.max_iterations);
        rd.optional(g, "gradient_tolerance", m.base.gp.gradient_tolerance);
        rd.optional(g, "length_scale_min", m.base.gp.length_scale_min);
    }
    if (const auto s = root["single_robot"]) {
        rd.expect_map(s, "single_robot");
        rd.reject_unknown(s, {"start", "initial_samples"}, "single_robot");
        if (const auto p = s["start"]) m.single_start = rd.point(p, "start");
        rd.optional(s, "initial_samples", m.single_initial_samples);
    }
    if (const auto s = root["multi_robot"]) {
        rd.expect_map(s, "multi_robot");
        rd.reject_unknown(s, {"starts", "initial_samples"}, "multi_robot");
        if (const auto p = s["starts"]) m.multi_starts = rd.points(p, "starts");
        rd.optional(s, "initial_samples", m.multi_initial_samples);
    }

    check_runs(rd, root, m);
    return m;
}

ExperimentManifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot read manifest " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest_text(text.str(), path.string());
}

ExperimentManifest full_matrix_manifest() {
    ExperimentManifest m;
    m.scenarios = {Scenario::HT, Scenario::RW, Scenario::FVP, Scenario::DVP};
    m.variants = {InfoVariant::max_mean(),
                  InfoVariant::weighted_variant(0.75),
                  InfoVariant::weighted_variant(0.5),
                  InfoVariant::weighted_variant(0.25),
                  InfoVariant::max_var(),
                  InfoVariant::max_var_max_mean(),
                  {VariantKind::sweep_baseline, 0.0, 0.0, 0.0, false, kBaseline}};
    m.sources = {{4.0, 7.0}, {0.0, 0.0}, {9.0, 0.0}, {0.0, 14.0}, {9.0, 14.0}};
    m.trials = 5;
    return m;
}

}  // namespace gpsampling
