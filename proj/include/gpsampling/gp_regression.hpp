#pragma once

// Exact Gaussian-process regression over 2-D locations with a
// squared-exponential kernel.
//
// Observations are modelled after subtracting their mean (the model adds it
// back on prediction). Samples taken at bit-identical locations are grouped
// internally: the posterior and the marginal likelihood are computed from
// per-location averages with noise sigma_n^2 / m, plus the exact
// within-location likelihood term. This keeps the linear algebra bounded by
// the number of distinct locations while giving the same answers as the
// full M x M system.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "gpsampling/geometry.hpp"

namespace gpsampling {

inline constexpr double kNoiseVarianceFloor = 1e-6;

struct Hyperparams {
    double signal_variance = 1.0;  // sigma_f^2
    double length_scale = 1.0;     // l, meters
    double noise_variance = kNoiseVarianceFloor;  // sigma_n^2

    friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Throws std::invalid_argument unless all fields are finite and positive
/// and the noise variance is at or above the floor.
void validate(const Hyperparams& h);

struct TrainingSet {
    std::vector<Point2> locations;
    std::vector<double> observations;

    void add(const Point2& q, double z) {
        locations.push_back(q);
        observations.push_back(z);
    }
    std::size_t size() const { return locations.size(); }
    bool empty() const { return locations.empty(); }
};

class FactorizationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

double kernel_eval(const Point2& a, const Point2& b, const Hyperparams& h);

/// K(points, points) + sigma_n^2 I. Throws std::invalid_argument on an empty list.
Eigen::MatrixXd gram(std::span<const Point2> points, const Hyperparams& h);

/// Log marginal likelihood of the (mean-centered) observations and its
/// gradient with respect to (ln sigma_f^2, ln l, ln sigma_n^2).
struct LogLikelihood {
    double value = 0.0;
    Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
    /// False when the covariance could not be factorized; value is then -inf.
    bool valid = true;
};

LogLikelihood log_marginal_likelihood(const TrainingSet& training, const Hyperparams& h);

struct FitOptions {
    int restarts = 3;
    int max_iterations = 100;
    double gradient_tolerance = 1e-5;
    double length_scale_min = 0.1;
    /// Upper bound on l; 0 means "diagonal of the training locations' bounding box".
    double length_scale_max = 0.0;
    std::uint64_t seed = 0;
};

/// Maximizes the log marginal likelihood with projected BFGS in log space,
/// starting from init and from `restarts` random log-uniform draws.
/// Requires at least two samples.
Hyperparams fit(const TrainingSet& training, const Hyperparams& init, const FitOptions& options = {});

struct Prediction {
    Eigen::VectorXd mean;
    Eigen::VectorXd variance;
};

/// Prior mean of the posterior: the observations' average (default) or zero.
enum class PriorMean { centered, zero };

/// Posterior of a fitted GP. Immutable once built.
class GpModel {
public:
    /// Factorizes the training covariance. An empty training set yields the prior.
    /// Throws FactorizationError when the covariance is not positive definite.
    GpModel(TrainingSet training, const Hyperparams& hyper, PriorMean prior = PriorMean::centered);

    Prediction predict(std::span<const Point2> queries) const;

    const TrainingSet& training() const { return training_; }
    const Hyperparams& hyper() const { return hyper_; }
    /// Prior mean: the mean of the observations, or 0 for PriorMean::zero.
    double offset() const { return offset_; }
    std::size_t distinct_locations() const { return sites_.size(); }

private:
    TrainingSet training_;
    Hyperparams hyper_;
    double offset_ = 0.0;
    std::vector<Point2> sites_;
    Eigen::MatrixXd factor_;  // lower Cholesky factor of K + sigma_n^2 diag(1/m)
    Eigen::VectorXd weights_;
};

}  // namespace gpsampling
