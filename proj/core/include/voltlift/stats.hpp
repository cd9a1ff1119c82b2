#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "voltlift/sim.hpp"

// Empirical verification of the ergodic machinery: exact 1-D Wasserstein
// distances between scalar marginals, LLN mean-square error curves with a
// rate regression, and CLT normality with two asymptotic-variance
// estimators.

namespace voltlift::stats {

// Exact W_p between empirical measures (sorted-pairing for equal sizes;
// quantile-function coupling otherwise).
double wasserstein_1d(std::vector<double> a, std::vector<double> b, double p_exp = 1.0);

enum class Observable { identity_mode_k, square_mode_k, tanh_mode_k };

double apply_observable(Observable f, const std::vector<double>& u, std::size_t mode);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0;  // slope +- 2 stderr
};

// Least squares on (log x, log y); positive data only.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentResult {
    std::string label;
    std::vector<double> x;      // T values / times
    std::vector<double> y;      // MSE / W1
    std::vector<double> y_err;  // standard errors where available
    SlopeFit fit;
};

struct LiftChoice {
    const laplace_lift::QuadratureRule* rule = nullptr;
    const shift_lift::ShiftGrid* grid = nullptr;
};

// Mean-square error of the time average of f against the long-run mean
// pi(f), per horizon T, with a log-log slope fit.  pi(f) comes from a
// reference value when finite (analytic cases) or a 10x-longer reference
// run with a shifted seed.
struct LLNOptions {
    Observable f = Observable::identity_mode_k;
    std::size_t mode = 0;
    std::vector<double> T_grid = {25, 50, 100, 200, 400};
    int n_paths = 400;
    std::uint64_t seed = 1234;
    double reference_mean = 0.0;
    bool have_reference_mean = true;  // false: run the long reference
    int threads = 0;
};
ExperimentResult lln_experiment(const sim::ModelSpec& m, const sim::SimConfig& base,
                                const LiftChoice& lift, const LLNOptions& opt);

struct CLTResult {
    double sigma_sample = 0.0;   // std of sqrt(T)(avg - pi(f)) across paths
    double sigma_plugin = 0.0;   // 2 int_0^inf Cov(f(X_t), f(X_0)) dt, truncated HAC
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    int truncation_lag = 0;
    std::vector<double> normalized;  // deviations / sigma_sample
};

struct CLTOptions {
    Observable f = Observable::identity_mode_k;
    std::size_t mode = 0;
    double T = 500.0;
    int n_paths = 2000;
    std::uint64_t seed = 4321;
    double reference_mean = 0.0;
    double record_stride = 0.1;  // autocovariance sampling interval
    int threads = 0;
};
CLTResult clt_experiment(const sim::ModelSpec& m, const sim::SimConfig& base,
                         const LiftChoice& lift, const CLTOptions& opt);

// W1 between the scalar marginal at each t in t_grid and a proxy for pi
// (the marginal at 2 t_max); reports the isotonic-decay residual and a
// log-linear slope fit.
struct MarginalOptions {
    std::size_t mode = 0;
    std::vector<double> t_grid = {0.5, 1.0, 1.5, 2.0, 3.0};
    int n_paths = 2000;
    std::uint64_t seed = 777;
    int threads = 0;
};
struct MarginalResult {
    ExperimentResult curve;
    double isotonic_residual = 0.0;  // relative residual of the nonincreasing fit
    double noise_floor = 0.0;        // W1 between two independent proxy samples
};
MarginalResult limit_marginal_check(const sim::ModelSpec& m, const sim::SimConfig& base,
                                    const LiftChoice& lift, const MarginalOptions& opt);

// Moments of a sample.
struct SampleMoments {
    double mean = 0.0, stddev = 0.0, skewness = 0.0, excess_kurtosis = 0.0;
};
SampleMoments sample_moments(const std::vector<double>& v);

// Pool-adjacent-violators fit of a nonincreasing sequence; returns the
// relative L2 residual.
double isotonic_decreasing_residual(const std::vector<double>& y);

}  // namespace voltlift::stats
