#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bhtlab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;  // from OLS residuals; zero with two points
    double residual_rms = 0.0;
};

LinearFit ols(std::span<const double> x, std::span<const double> y);
// Fit of log(y) against log(x); every value must be positive.
LinearFit loglog_fit(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
double standard_error(std::span<const double> v);
double standard_deviation(std::span<const double> v);

// Bootstrap over trials: each resample redraws the trials of every x independently,
// refits the log-log slope of the means and returns the standard deviation of those slopes.
double bootstrap_slope_sigma(std::span<const double> x, const std::vector<std::vector<double>>& trials,
                             int resamples, std::uint64_t seed);

// Bootstrap standard deviation of the mean of one sample.
double bootstrap_mean_sigma(std::span<const double> sample, int resamples, std::uint64_t seed);

}  // namespace bhtlab
