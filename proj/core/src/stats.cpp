#include "bhtlab/stats.hpp"

#include "bhtlab/random.hpp"
#include "bhtlab/summation.hpp"

#include <cmath>
#include <stdexcept>

namespace bhtlab {

LinearFit ols(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols needs two or more paired points");
    const double n = static_cast<double>(x.size());
    double mx = mean(x), my = mean(y);
    CompensatedSum<double> sxx, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx.add((x[i] - mx) * (x[i] - mx));
        sxy.add((x[i] - mx) * (y[i] - my));
    }
    if (sxx.value() == 0.0) throw std::invalid_argument("ols needs distinct abscissae");
    LinearFit fit;
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
    CompensatedSum<double> rss;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - fit.intercept - fit.slope * x[i];
        rss.add(r * r);
    }
    fit.residual_rms = std::sqrt(rss.value() / n);
    if (x.size() > 2) fit.slope_stderr = std::sqrt(rss.value() / (n - 2.0) / sxx.value());
    return fit;
}

LinearFit loglog_fit(std::span<const double> x, std::span<const double> y)
{
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) throw std::domain_error("loglog_fit needs positive abscissae");
        lx[i] = std::log(x[i]);
    }
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::domain_error("loglog_fit needs positive ordinates");
        ly[i] = std::log(y[i]);
    }
    return ols(lx, ly);
}

double mean(std::span<const double> v)
{
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    return compensated_sum(v) / static_cast<double>(v.size());
}

double standard_deviation(std::span<const double> v)
{
    if (v.size() < 2) return 0.0;
    double m = mean(v);
    CompensatedSum<double> acc;
    for (double e : v) acc.add((e - m) * (e - m));
    return std::sqrt(acc.value() / static_cast<double>(v.size() - 1));
}

double standard_error(std::span<const double> v)
{
    return v.size() < 2 ? 0.0 : standard_deviation(v) / std::sqrt(static_cast<double>(v.size()));
}

double bootstrap_slope_sigma(std::span<const double> x, const std::vector<std::vector<double>>& trials,
                             int resamples, std::uint64_t seed)
{
    if (x.size() != trials.size()) throw std::invalid_argument("bootstrap: x and trial sets differ in length");
    std::vector<double> slopes;
    slopes.reserve(static_cast<std::size_t>(resamples));
    std::vector<double> means(x.size());
    for (int b = 0; b < resamples; ++b) {
        RandomStream rng(seed, static_cast<std::uint64_t>(b), 0xb007);
        for (std::size_t i = 0; i < trials.size(); ++i) {
            const auto& t = trials[i];
            CompensatedSum<double> acc;
            for (std::size_t r = 0; r < t.size(); ++r) acc.add(t[rng.below(t.size())]);
            means[i] = acc.value() / static_cast<double>(t.size());
        }
        slopes.push_back(loglog_fit(x, means).slope);
    }
    return standard_deviation(slopes);
}

double bootstrap_mean_sigma(std::span<const double> sample, int resamples, std::uint64_t seed)
{
    if (sample.empty()) throw std::invalid_argument("bootstrap of empty sample");
    std::vector<double> means;
    means.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        RandomStream rng(seed, static_cast<std::uint64_t>(b), 0xb00f);
        CompensatedSum<double> acc;
        for (std::size_t r = 0; r < sample.size(); ++r) acc.add(sample[rng.below(sample.size())]);
        means.push_back(acc.value() / static_cast<double>(sample.size()));
    }
    return standard_deviation(means);
}

}  // namespace bhtlab
