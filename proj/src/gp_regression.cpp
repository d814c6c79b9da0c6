#include "gpsampling/gp_regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Cholesky>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace gpsampling {

namespace {

// Flushes subnormals to zero while in scope. Short length scales put tiny
// kernel entries into the factorization, and subnormal arithmetic is an order
// of magnitude slower on x86 while contributing nothing to the likelihood.
class FlushSubnormals {
public:
#if defined(__SSE__)
    FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040); }
    ~FlushSubnormals() { _mm_setcsr(saved_); }

private:
    unsigned saved_;
#endif
};

// Samples collapsed onto distinct locations (sorted lexicographically).
struct GroupedSamples {
    std::vector<Point2> sites;
    Eigen::VectorXd counts;
    Eigen::VectorXd means;  // centered per-site averages
    double within_ss = 0.0;  // sum of squared deviations from the per-site averages
    std::size_t total = 0;
    double offset = 0.0;
};

GroupedSamples group(const TrainingSet& training, bool center = true) {
    GroupedSamples g;
    g.total = training.size();
    if (g.total == 0) return g;
    if (center) {
        g.offset = std::accumulate(training.observations.begin(), training.observations.end(), 0.0) /
                   static_cast<double>(g.total);
    }

    std::vector<std::size_t> order(g.total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lex_less(training.locations[a], training.locations[b]);
    });

    std::vector<double> counts;
    std::vector<double> means;
    std::size_t begin = 0;
    while (begin < order.size()) {
        const Point2 site = training.locations[order[begin]];
        std::size_t end = begin;
        double sum = 0.0;
        while (end < order.size() && training.locations[order[end]] == site) {
            sum += training.observations[order[end]] - g.offset;
            ++end;
        }
        const double m = static_cast<double>(end - begin);
        const double avg = sum / m;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = training.observations[order[i]] - g.offset - avg;
            g.within_ss += d * d;
        }
        g.sites.push_back(site);
        counts.push_back(m);
        means.push_back(avg);
        begin = end;
    }
    g.counts = Eigen::Map<Eigen::VectorXd>(counts.data(), static_cast<Eigen::Index>(counts.size()));
    g.means = Eigen::Map<Eigen::VectorXd>(means.data(), static_cast<Eigen::Index>(means.size()));
    return g;
}

Eigen::MatrixXd squared_distances(const std::vector<Point2>& sites) {
    const auto n = static_cast<Eigen::Index>(sites.size());
    Eigen::MatrixXd r2(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        r2(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            r2(i, j) = r2(j, i) = squared_distance(sites[static_cast<std::size_t>(i)], sites[static_cast<std::size_t>(j)]);
        }
    }
    return r2;
}

double sample_variance(const std::vector<double>& z) {
    if (z.size() < 2) return 0.0;
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
    double ss = 0.0;
    for (double v : z) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(z.size() - 1);
}

double bounding_diagonal(const std::vector<Point2>& points) {
    if (points.empty()) return 0.0;
    double x0 = points.front().x, x1 = x0, y0 = points.front().y, y1 = y0;
    for (const auto& p : points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    return std::hypot(x1 - x0, y1 - y0);
}

double rms_spread(const std::vector<Point2>& points) {
    Point2 c;
    for (const auto& p : points) {
        c.x += p.x;
        c.y += p.y;
    }
    c.x /= static_cast<double>(points.size());
    c.y /= static_cast<double>(points.size());
    double ss = 0.0;
    for (const auto& p : points) ss += squared_distance(p, c);
    return std::sqrt(ss / static_cast<double>(points.size()));
}

Hyperparams from_log(const Eigen::Vector3d& theta) {
    return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
}

Eigen::Vector3d to_log(const Hyperparams& h) {
    return {std::log(h.signal_variance), std::log(h.length_scale), std::log(h.noise_variance)};
}

// Scratch buffers reused across the likelihood evaluations of one fit.
struct LmlWorkspace {
    Eigen::MatrixXd kern;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd lower_inv;
    Eigen::MatrixXd cov_inv;
    Eigen::MatrixXd dkern;
    Eigen::VectorXd alpha;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

LogLikelihood grouped_lml(const GroupedSamples& g, const Eigen::MatrixXd& r2, const Hyperparams& h, LmlWorkspace& ws) {
    LogLikelihood out;
    const auto n = static_cast<Eigen::Index>(g.sites.size());
    const double inv_two_l2 = 1.0 / (2.0 * h.length_scale * h.length_scale);
    ws.kern = h.signal_variance * (-r2.array() * inv_two_l2).exp().matrix();
    const Eigen::VectorXd noise_diag = h.noise_variance * g.counts.cwiseInverse();

    ws.cov = ws.kern;
    ws.cov.diagonal() += noise_diag;
    ws.llt.compute(ws.cov);
    if (ws.llt.info() != Eigen::Success) {
        out.valid = false;
        out.value = -std::numeric_limits<double>::infinity();
        return out;
    }
    ws.alpha = ws.llt.solve(g.means);
    const Eigen::VectorXd& alpha = ws.alpha;

    const double two_pi = 2.0 * std::numbers::pi;
    const double extra_count = static_cast<double>(g.total) - static_cast<double>(n);
    double value = -0.5 * g.means.dot(alpha) - ws.llt.matrixLLT().diagonal().array().log().sum() -
                   0.5 * static_cast<double>(n) * std::log(two_pi);
    value += -0.5 * extra_count * std::log(two_pi * h.noise_variance) - 0.5 * g.counts.array().log().sum() -
             g.within_ss / (2.0 * h.noise_variance);
    out.value = value;

    // dLML/dtheta = 1/2 (alpha^T dC alpha - tr(C^{-1} dC)), with C^{-1} = L^-T L^-1
    ws.lower_inv.setIdentity(n, n);
    ws.llt.matrixL().solveInPlace(ws.lower_inv);
    ws.cov_inv.setZero(n, n);
    ws.cov_inv.selfadjointView<Eigen::Lower>().rankUpdate(ws.lower_inv.transpose());
    // only the lower triangle of cov_inv is filled; both kernels are symmetric
    const auto trace_with = [&](const Eigen::MatrixXd& m) {
        return 2.0 * (ws.cov_inv.array() * m.array()).sum() - (ws.cov_inv.diagonal().array() * m.diagonal().array()).sum();
    };

    ws.dkern = (ws.kern.array() * r2.array()).matrix() / (h.length_scale * h.length_scale);
    out.gradient[0] = 0.5 * (alpha.dot(ws.kern * alpha) - trace_with(ws.kern));
    out.gradient[1] = 0.5 * (alpha.dot(ws.dkern * alpha) - trace_with(ws.dkern));
    out.gradient[2] = 0.5 * ((alpha.array().square() - ws.cov_inv.diagonal().array()) * noise_diag.array()).sum() -
                      0.5 * extra_count + g.within_ss / (2.0 * h.noise_variance);
    return out;
}

struct Box {
    Eigen::Vector3d lo;
    Eigen::Vector3d hi;
    Eigen::Vector3d clamp(const Eigen::Vector3d& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

struct Candidate {
    Eigen::Vector3d theta = Eigen::Vector3d::Zero();
    double value = -std::numeric_limits<double>::infinity();
};

// Projected BFGS ascent on the log marginal likelihood.
Candidate ascend(const GroupedSamples& g, const Eigen::MatrixXd& r2, const Box& box, Eigen::Vector3d x,
                 const FitOptions& options, LmlWorkspace& ws) {
    x = box.clamp(x);
    LogLikelihood cur = grouped_lml(g, r2, from_log(x), ws);
    if (!cur.valid) return {x, cur.value};

    Eigen::Matrix3d inv_hessian = Eigen::Matrix3d::Identity();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        Eigen::Vector3d pg = cur.gradient;
        for (int i = 0; i < 3; ++i) {
            const bool at_lo = x[i] <= box.lo[i] && pg[i] < 0.0;
            const bool at_hi = x[i] >= box.hi[i] && pg[i] > 0.0;
            if (at_lo || at_hi) pg[i] = 0.0;
        }
        if (pg.norm() < options.gradient_tolerance) break;

        Eigen::Vector3d dir = inv_hessian * pg;
        for (int i = 0; i < 3; ++i) {
            if (pg[i] == 0.0) dir[i] = 0.0;
        }
        if (dir.dot(pg) <= 0.0) {
            inv_hessian.setIdentity();
            dir = pg;
        }
        const double longest = dir.cwiseAbs().maxCoeff();
        if (longest > 2.0) dir *= 2.0 / longest;

        double step = 1.0;
        bool accepted = false;
        Eigen::Vector3d next;
        LogLikelihood trial;
        for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
            next = box.clamp(x + step * dir);
            trial = grouped_lml(g, r2, from_log(next), ws);
            if (trial.valid && trial.value >= cur.value + 1e-4 * pg.dot(next - x)) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;

        const Eigen::Vector3d s = next - x;
        const Eigen::Vector3d y = cur.gradient - trial.gradient;  // gradient change of -LML
        const double sy = s.dot(y);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::Matrix3d eye = Eigen::Matrix3d::Identity();
            inv_hessian = (eye - rho * s * y.transpose()) * inv_hessian * (eye - rho * y * s.transpose()) +
                          rho * s * s.transpose();
        }
        x = next;
        cur = trial;
        if (s.norm() < 1e-12) break;
    }
    return {x, cur.value};
}

}  // namespace

void validate(const Hyperparams& h) {
    const auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!ok(h.signal_variance) || !ok(h.length_scale) || !ok(h.noise_variance)) {
        throw std::invalid_argument("hyperparameters must be finite and positive");
    }
    if (h.noise_variance < kNoiseVarianceFloor) {
        throw std::invalid_argument("noise variance below the floor");
    }
}

double kernel_eval(const Point2& a, const Point2& b, const Hyperparams& h) {
    return h.signal_variance * std::exp(-squared_distance(a, b) / (2.0 * h.length_scale * h.length_scale));
}

Eigen::MatrixXd gram(std::span<const Point2> points, const Hyperparams& h) {
    if (points.empty()) throw std::invalid_argument("gram matrix needs at least one point");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = h.signal_variance + h.noise_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            k(i, j) = k(j, i) = kernel_eval(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)], h);
        }
    }
    return k;
}

LogLikelihood log_marginal_likelihood(const TrainingSet& training, const Hyperparams& h) {
    validate(h);
    if (training.locations.size() != training.observations.size() || training.empty()) {
        throw std::invalid_argument("training set must be nonempty with matching lengths");
    }
    const GroupedSamples g = group(training);
    const FlushSubnormals ftz;
    LmlWorkspace ws;
    return grouped_lml(g, squared_distances(g.sites), h, ws);
}

Hyperparams fit(const TrainingSet& training, const Hyperparams& init, const FitOptions& options) {
    validate(init);
    if (training.locations.size() != training.observations.size()) {
        throw std::invalid_argument("training locations and observations differ in length");
    }
    if (training.size() < 2) throw std::invalid_argument("fitting needs at least two samples");

    const GroupedSamples g = group(training);
    const double l_max = std::max(options.length_scale_max > 0.0 ? options.length_scale_max
                                                                 : bounding_diagonal(g.sites),
                                  options.length_scale_min);

    const bool degenerate = g.within_ss == 0.0 && g.means.cwiseAbs().maxCoeff() == 0.0;
    if (degenerate) {
        return {init.signal_variance, l_max, kNoiseVarianceFloor};
    }

    const double data_var = std::max(sample_variance(training.observations), 1e-6);
    const double spread = std::max(rms_spread(g.sites), options.length_scale_min);
    Box box;
    box.lo = {std::log(data_var * 1e-4), std::log(options.length_scale_min), std::log(kNoiseVarianceFloor)};
    box.hi = {std::log(data_var * 1e4), std::log(l_max), std::log(std::max(data_var * 1e2, kNoiseVarianceFloor))};

    const Eigen::MatrixXd r2 = squared_distances(g.sites);
    const FlushSubnormals ftz;
    LmlWorkspace ws;

    Candidate best;
    {
        // init itself competes, so the result never scores below it
        const Eigen::Vector3d theta = to_log(init);
        const LogLikelihood at_init = grouped_lml(g, r2, init, ws);
        if (at_init.valid && (box.clamp(theta) - theta).cwiseAbs().maxCoeff() == 0.0) best = {theta, at_init.value};
    }
    const auto consider = [&](const Candidate& c) {
        if (c.value > best.value) best = c;
    };
    consider(ascend(g, r2, box, to_log(init), options, ws));

    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> log_factor(std::log(0.1), std::log(10.0));
    for (int r = 0; r < options.restarts; ++r) {
        const double f = log_factor(rng);
        const double l = log_factor(rng);
        const double n = log_factor(rng);
        const Eigen::Vector3d start{std::log(data_var) + f, std::log(spread) + l, std::log(data_var) + n};
        consider(ascend(g, r2, box, start, options, ws));
    }
    if (!std::isfinite(best.value)) {
        throw FactorizationError("no hyperparameter setting yields a positive definite covariance");
    }
    Hyperparams out = from_log(best.theta);
    out.noise_variance = std::max(out.noise_variance, kNoiseVarianceFloor);
    out.length_scale = std::clamp(out.length_scale, options.length_scale_min, l_max);
    return out;
}

GpModel::GpModel(TrainingSet training, const Hyperparams& hyper, PriorMean prior)
    : training_(std::move(training)), hyper_(hyper) {
    validate(hyper_);
    if (training_.locations.size() != training_.observations.size()) {
        throw std::invalid_argument("training locations and observations differ in length");
    }
    if (training_.empty()) return;

    GroupedSamples g = group(training_, prior == PriorMean::centered);
    offset_ = g.offset;
    sites_ = std::move(g.sites);
    Eigen::MatrixXd cov = gram(sites_, hyper_);
    cov.diagonal().array() -= hyper_.noise_variance;
    cov.diagonal() += hyper_.noise_variance * g.counts.cwiseInverse();

    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw FactorizationError("training covariance is not positive definite");
    }
    factor_ = llt.matrixL();
    weights_ = llt.solve(g.means);
}

Prediction GpModel::predict(std::span<const Point2> queries) const {
    const auto nq = static_cast<Eigen::Index>(queries.size());
    Prediction out;
    if (sites_.empty()) {
        out.mean = Eigen::VectorXd::Zero(nq);
        out.variance = Eigen::VectorXd::Constant(nq, hyper_.signal_variance);
        return out;
    }
    const auto n = static_cast<Eigen::Index>(sites_.size());
    Eigen::MatrixXd cross(n, nq);
    for (Eigen::Index j = 0; j < nq; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            cross(i, j) = kernel_eval(sites_[static_cast<std::size_t>(i)], queries[static_cast<std::size_t>(j)], hyper_);
        }
    }
    out.mean = (cross.transpose() * weights_).array() + offset_;
    factor_.triangularView<Eigen::Lower>().solveInPlace(cross);
    out.variance = (hyper_.signal_variance - cross.colwise().squaredNorm().array()).cwiseMax(0.0).matrix().transpose();
    return out;
}

}  // namespace gpsampling
