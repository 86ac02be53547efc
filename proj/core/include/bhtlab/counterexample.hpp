#pragma once

#include "bhtlab/grid.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhtlab {

// Raised when a grid cannot carry the requested band; names the smallest adequate size.
class BandwidthError : public std::invalid_argument {
public:
    BandwidthError(const std::string& what, std::size_t required_samples)
        : std::invalid_argument(what), required_samples_(required_samples)
    {
    }
    std::size_t required_samples() const { return required_samples_; }

private:
    std::size_t required_samples_;
};

// Two L1-normalized even bumps with nonnegative spectra c * exp(-1/(1/4 - xi^2)) on |xi| < 1/2.
struct BumpPair {
    SampledFunction phi1;
    SampledFunction phi2;
    Spectrum spectrum1;
    Spectrum spectrum2;
};

BumpPair make_bump_pair(const Grid& grid);

// Period used by the counterexample: 64 frequency samples fit in [-1/2, 1/2].
inline constexpr double kCounterexamplePeriod = 64.0;
// Smallest power-of-two sample count whose band contains 6N + 1/2 at the given period.
std::size_t required_samples(int n, double period = kCounterexamplePeriod);
Grid counterexample_grid(int max_n, double period = kCounterexamplePeriod);

struct RandomFamily {
    int n = 0;
    std::vector<int> eps;
    SampledFunction f;               // phi1(x - 1/2)
    std::vector<SampledFunction> g;  // phi2(x - 1/2) e^{4 pi i (k + 2 eps_k N) x}, k = 1..N
};

// Center of the k-th modulated bump's spectrum: 2 (k + 2 eps_k N).
inline double family_center(int k, int eps, int n) { return 2.0 * (k + 2 * eps * n); }

RandomFamily make_family(const BumpPair& bumps, int n, std::span<const int> eps);
// sum_k G_{N,k} without materializing the family.
SampledFunction family_sum(const BumpPair& bumps, int n, std::span<const int> eps);

struct Interval {
    double lo;
    double hi;
    double length() const { return hi - lo; }
};

// The 2N intervals centered at 1/2 + l/(8N), l = +-1..+-N, each of length 1/(32N).
std::vector<Interval> interval_system(int n);

// -eps_k e^{-4 pi i (k + 2 eps_k N) x} BHT(F, G_k)(x), computed with the spectral engine.
SampledFunction demodulated_profile(const RandomFamily& fam, int k);
// phi1(x - 1/2) phi2(x - 1/2) evaluated through the bump spectra at arbitrary points.
std::vector<cplx> product_profile(const BumpPair& bumps, std::span<const double> x);

struct KhinchineEstimate {
    double ratio = 0.0;  // E|sum eps_k a_k|^r / (sum a_k^2)^{r/2}
    double sigma = 0.0;  // bootstrap standard deviation of the estimate
    double ci = 0.0;     // 95% half-width, 1.96 sigma
};

KhinchineEstimate khinchine_ratio(std::span<const double> a, double r, int trials, std::uint64_t seed);
// Exhaustive average over all 2^N sign patterns; N <= 24.
double khinchine_exact(std::span<const double> a, double r);

struct ScalingRow {
    double parameter = 0.0;
    double value = 0.0;
    double std_error = 0.0;
};

struct ScalingReport {
    std::string experiment;
    std::vector<ScalingRow> rows;
    double slope = 0.0;
    double slope_ci = 0.0;  // 95% half-width; infinite when the trials cannot support a bootstrap
    std::uint64_t seed = 0;
};

struct ExpectationOptions {
    double r0 = 0.6;
    std::vector<int> n_list{8, 16, 32, 64, 128};
    int trials = 200;
    std::uint64_t seed = 1;
    int nodes_per_interval = 64;
    int bootstrap_resamples = 400;
    bool run_guard = true;  // compare the fast path against the full engine at the smallest N
};

struct ExpectationResult {
    ScalingReport report;
    std::vector<std::vector<double>> trial_values;  // per N, per trial
    double guard_error = 0.0;                       // relative sup error of the fast path
};

// E || sum_k BHT(F, G_{N,k}) ||^{r0}_{L^{r0}(I_N)} for each N, via the demodulated product.
ExpectationResult expectation_experiment(const BumpPair& bumps, const ExpectationOptions& opt);

// Closed-form E || sum_k BHT(F, G_{N,k}) ||^2_{L^2(I_N)} on the same quadrature nodes.
double expected_square_norm(const BumpPair& bumps, int n, int nodes_per_interval);

// || G_N^ ||_{L^{q0'}} for one sampled sign vector per N.
ScalingReport fl_norm_experiment(const BumpPair& bumps, double q0, std::span<const int> n_list, std::uint64_t seed);

struct Verdict {
    double lower = 0.0;      // measured growth exponent of the expectation
    double upper = 0.0;      // (FL slope) * r0
    double margin = 0.0;     // tolerance used to separate the exponents
    double target_lower = 0.0;
    double target_upper = 0.0;
    std::string verdict;     // "unbounded", "inconclusive" or "no contradiction"
    std::string predicted;   // same rule applied to the target exponents
};

// Exponent gaps smaller than this are treated as ties.
inline constexpr double kExponentTolerance = 0.05;

Verdict contradiction_summary(const ScalingReport& expectation, const ScalingReport& fl_norm, double r0, double q0);
std::string classify_exponents(double lower, double upper, double margin);

std::vector<int> rademacher_signs(int n, std::uint64_t seed, std::uint64_t stream);

}  // namespace bhtlab
