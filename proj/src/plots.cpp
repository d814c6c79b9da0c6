#include "gpsampling/plots.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace gpsampling {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 460.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;  // room for the legend
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `count` ticks.
double nice_step(double span, int count) {
    const double raw = span / count;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) return m * mag;
    }
    return 10.0 * mag;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

double metric_of(const StepRecord& r, Metric m) {
    switch (m) {
        case Metric::rmse: return r.rmse;
        case Metric::mean_variance: return r.mean_variance;
        case Metric::cumulative_distance: return r.cumulative_distance;
    }
    return 0.0;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

// Blue-to-yellow ramp for heatmaps.
std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static constexpr std::array<std::array<double, 3>, 5> stops{
        {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    const double pos = t * (stops.size() - 1);
    const auto i = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
    const double f = pos - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                  static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                  static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
    return buf;
}

std::string render_heatmap(const GridSpec& grid, const std::vector<double>& values, const std::string& title,
                           const std::string& unit) {
    const double cell = 24.0;
    const double w = static_cast<double>(grid.columns()) * cell;
    const double h = static_cast<double>(grid.rows()) * cell;
    Range r;
    for (double v : values) r.add(v);
    r.settle();

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w + 160) << "\" height=\"" << num(h + 80)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(20 + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
    for (CellId c = 0; c < grid.cell_count(); ++c) {
        // y grows upward in the field, downward in SVG
        const double x = 20 + static_cast<double>(grid.column_of(c)) * cell;
        const double y = 40 + h - static_cast<double>(grid.row_of(c) + 1) * cell;
        svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell) << "\" height=\"" << num(cell)
            << "\" fill=\"" << ramp((values[c] - r.lo) / (r.hi - r.lo)) << "\"/>\n";
    }
    const double bx = 40 + w;
    for (int i = 0; i < 50; ++i) {
        const double y = 40 + h - (i + 1) * h / 50;
        svg << "<rect x=\"" << num(bx) << "\" y=\"" << num(y) << "\" width=\"16\" height=\"" << num(h / 50 + 0.5)
            << "\" fill=\"" << ramp((i + 0.5) / 50) << "\"/>\n";
    }
    svg << "<text x=\"" << num(bx + 22) << "\" y=\"" << num(40 + h) << "\">" << tick_label(r.lo) << "</text>\n";
    svg << "<text x=\"" << num(bx + 22) << "\" y=\"52\">" << tick_label(r.hi) << "</text>\n";
    svg << "<text x=\"" << num(bx) << "\" y=\"" << num(60 + h) << "\">" << escape(unit) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string file_safe(std::string s) {
    for (char& c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    return s;
}

}  // namespace

std::string render_svg(const LineChart& chart) {
    Range xr, yr;
    for (const auto& s : chart.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    xr.settle();
    yr.settle();
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
    const auto py = [&](double y) { return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(chart.title) << "</text>\n";

    svg << "<g class=\"axes\" stroke=\"#444\">\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(kLeft + plot_w)
        << "\" y2=\"" << num(kTop + plot_h) << "\"/>\n";
    svg << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
        << num(kTop + plot_h) << "\"/>\n";
    svg << "</g>\n";

    const double xs = nice_step(xr.hi - xr.lo, 6);
    for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
        svg << "<line x1=\"" << num(px(t)) << "\" y1=\"" << num(kTop + plot_h) << "\" x2=\"" << num(px(t)) << "\" y2=\""
            << num(kTop + plot_h + 5) << "\" stroke=\"#444\"/>";
        svg << "<text x=\"" << num(px(t)) << "\" y=\"" << num(kTop + plot_h + 19) << "\" text-anchor=\"middle\">"
            << tick_label(t) << "</text>\n";
    }
    const double ys = nice_step(yr.hi - yr.lo, 6);
    for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
        svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(py(t)) << "\" x2=\"" << num(kLeft + plot_w)
            << "\" y2=\"" << num(py(t)) << "\" stroke=\"#ddd\"/>";
        svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(t) + 4) << "\" text-anchor=\"end\">"
            << tick_label(t) << "</text>\n";
    }
    svg << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
        << escape(chart.x_label) << "</text>\n";
    svg << "<text transform=\"translate(18," << num(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const auto& s = chart.series[i];
        const char* color = kPalette[i % kPalette.size()];
        svg << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.8\" points=\"";
        for (std::size_t k = 0; k < std::min(s.x.size(), s.y.size()); ++k) {
            if (k > 0) svg << ' ';
            svg << num(px(s.x[k])) << ',' << num(py(s.y[k]));
        }
        svg << "\"/>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < chart.series.size(); ++i) {
        const double y = kTop + 10 + static_cast<double>(i) * 20;
        const double x = kWidth - kRight + 16;
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x + 24) << "\" y2=\"" << num(y)
            << "\" stroke=\"" << kPalette[i % kPalette.size()] << "\" stroke-width=\"3\"/>";
        svg << "<text class=\"legend-entry\" x=\"" << num(x + 30) << "\" y=\"" << num(y + 4) << "\">"
            << escape(chart.series[i].label) << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

Series average_series(const std::vector<const TrialLog*>& logs, Metric metric, double step) {
    Series s;
    double start = 0.0;
    double end = 0.0;
    for (const auto* log : logs) {
        if (log->records.empty()) return s;
        start = std::max(start, log->records.front().time);
        end = std::max(end, log->records.back().time);
    }
    if (logs.empty() || !(step > 0.0)) return s;
    const auto value_at = [&](double t) {
        double sum = 0.0;
        for (const auto* log : logs) sum += metric_of(*record_at_time(*log, t), metric);
        return sum / static_cast<double>(logs.size());
    };
    for (double t = start;; t += step) {
        if (t >= end) t = end;
        s.x.push_back(t);
        s.y.push_back(value_at(t));
        if (t >= end) break;
    }
    return s;
}

std::vector<fs::path> emit_plots(const std::vector<TrialLog>& logs, const fs::path& dir, bool heatmaps) {
    fs::create_directories(dir);
    std::vector<fs::path> written;

    // scenario -> variant -> logs, both in order of first appearance
    std::vector<std::pair<Scenario, std::vector<std::pair<std::string, std::vector<const TrialLog*>>>>> groups;
    for (const auto& log : logs) {
        auto sit = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == log.config.scenario; });
        if (sit == groups.end()) {
            groups.push_back({log.config.scenario, {}});
            sit = std::prev(groups.end());
        }
        auto& variants = sit->second;
        auto vit = std::find_if(variants.begin(), variants.end(),
                                [&](const auto& v) { return v.first == log.config.variant.name; });
        if (vit == variants.end()) {
            variants.push_back({log.config.variant.name, {}});
            vit = std::prev(variants.end());
        }
        vit->second.push_back(&log);
    }
    std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    struct Panel {
        Metric metric;
        const char* file;
        const char* title;
        const char* unit;
    };
    constexpr std::array<Panel, 3> panels{{{Metric::rmse, "rmse", "RMSE", "RMSE (dBm)"},
                                           {Metric::mean_variance, "variance", "Variance", "mean variance (dBm^2)"},
                                           {Metric::cumulative_distance, "distance", "Cumulative Distance",
                                            "cumulative distance (m)"}}};

    for (const auto& [scenario, variants] : groups) {
        const std::string sc(to_string(scenario));
        for (const auto& panel : panels) {
            LineChart chart;
            chart.title = sc + ": " + panel.title;
            chart.x_label = "simulated time (s)";
            chart.y_label = panel.unit;
            for (const auto& [name, members] : variants) {
                Series s = average_series(members, panel.metric, 1.0);
                s.label = name;
                chart.series.push_back(std::move(s));
            }
            const fs::path path = dir / (sc + "_" + panel.file + ".svg");
            write_file(path, render_svg(chart));
            written.push_back(path);
        }
        if (!heatmaps) continue;
        for (const auto& [name, members] : variants) {
            const TrialLog& first = *members.front();
            const auto truth = trial_field(first.config, first.seed);
            const auto& mean = first.final_prediction.mean;
            const auto& var = first.final_prediction.variance;
            const std::string stem = sc + "_" + file_safe(name);
            const std::array<std::tuple<std::string, std::vector<double>, std::string>, 3> maps{{
                {"truth", truth.values(), "dBm"},
                {"mean", std::vector<double>(mean.data(), mean.data() + mean.size()), "dBm"},
                {"variance", std::vector<double>(var.data(), var.data() + var.size()), "dBm^2"},
            }};
            for (const auto& [kind, values, unit] : maps) {
                const fs::path path = dir / (stem + "_" + kind + ".svg");
                write_file(path, render_heatmap(first.config.grid, values, sc + " " + name + ": " + kind, unit));
                written.push_back(path);
            }
        }
    }
    return written;
}

}  // namespace gpsampling
