#pragma once

#include "bhtlab/grid.hpp"
#include "bhtlab/random.hpp"

#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace bhtlab {

enum class SymbolKind { sign, exp_decay, custom };

struct Symbol {
    std::function<cplx(double, double)> eval;
    double delta = 0.0;  // 0: no exponential factor claimed
    SymbolKind kind = SymbolKind::custom;

    cplx operator()(double xi1, double xi2) const { return eval(xi1, xi2); }
};

// Euclidean distance from (a, b) to the diagonal {xi1 = xi2}.
inline double distance_to_diagonal(double a, double b) { return std::abs(a - b) / std::numbers::sqrt2; }

Symbol sign_symbol();                    // sgn(xi1 - xi2), zero on the diagonal
Symbol exp_decay_symbol(double delta);   // exp(-delta |xi| / dist(xi, diagonal)), zero on the diagonal
Symbol constant_symbol(cplx value);
Symbol scaled(const Symbol& m, cplx factor);

struct MultiplierResult {
    SampledFunction value;
    bool band_limit_warning = false;  // an input put more than 1e-10 of its energy in the top 10% of frequencies
};

// g(x_j) = L^-2 sum_{m1,m2} m(xi1, xi2) f1^(xi1) f2^(xi2) e^{2 pi i x_j (xi1 + xi2)}, one inverse
// FFT per active xi1.
MultiplierResult apply_bilinear_multiplier(const Symbol& m, const SampledFunction& f1, const SampledFunction& f2);

// Fraction of spectral energy in |xi| > 0.9 * Nyquist.
double top_band_energy_fraction(const Spectrum& s);
// Largest |xi| whose coefficient exceeds rel_tol times the largest coefficient.
double max_active_frequency(const Spectrum& s, double rel_tol = 1e-13);

// Larger cutoffs leave a truncation error above the oracle tolerance.
inline constexpr double kMaxPvEta = 1e-4;

struct PvQuadratureConfig {
    double eta = 1e-7;
    double tmax = 10.0;
    int nodes_per_decade = 16;  // log-spaced panel breakpoints
    int gauss_points = 8;       // Gauss-Legendre nodes per panel

    void validate() const;
};

// p.v. int f1(x - t) f2(x + t) dt / t equals this constant times the sgn(xi1 - xi2) multiplier
// for the transform convention of this library. Fixed by the single-tone calibration test.
inline const cplx kPvToSpectral{0.0, -std::numbers::pi};

// int_eta^tmax [f1(x - t) f2(x + t) - f1(x + t) f2(x - t)] dt / t at each point.
// Off-grid arguments use the trigonometric interpolant. Panels are split further so that no
// panel is wider than a quarter period of the fastest oscillation present.
std::vector<cplx> bht_timedomain(const SampledFunction& f1, const SampledFunction& f2,
                                 const PvQuadratureConfig& cfg, std::span<const double> points);

struct SymbolCheckRow {
    double xi1 = 0.0;
    double xi2 = 0.0;
    int alpha1 = 0;
    int alpha2 = 0;
    double derivative = 0.0;  // |finite-difference estimate of d^alpha m|
    double envelope = 0.0;
    double ratio = 0.0;
};

struct SymbolCheckReport {
    std::vector<SymbolCheckRow> rows;
    std::vector<std::pair<double, double>> skipped;  // points on the diagonal
    double max_ratio = 0.0;
    double constant = 0.0;
    bool pass = false;
};

// Central finite differences (step 1e-4 * dist) for |alpha| <= max_order against
// dist^-|alpha| exp(-delta (1 - |alpha|/3) |xi| / dist). Passes when every ratio is at most constant.
SymbolCheckReport verify_symbol_class(const Symbol& m, std::span<const std::pair<double, double>> points,
                                      int max_order, double constant);
// Largest ratio over a calibration set; freeze the result and pass it to verify_symbol_class.
double fit_symbol_constant(const Symbol& m, std::span<const std::pair<double, double>> points, int max_order);

// Oracle grid: 4096 samples over [-64, 64).
Grid oracle_grid();
inline constexpr double kOracleWindow = 4.0;   // errors are measured on |x| <= this
inline constexpr double kOracleTolerance = 1e-3;

// Three Gaussian-windowed tones: frequency in [-3, 3], center in [-1, 1], complex normal amplitude.
SampledFunction random_gaussian_tones(const Grid& grid, RandomStream& rs);

struct OracleCase {
    int case_id = 0;
    double rel_l2_err = 0.0;
};

// Spectral sgn multiplier, scaled by kPvToSpectral, against the p.v. quadrature for seeded pairs.
std::vector<OracleCase> oracle_suite(int cases, std::uint64_t seed, const PvQuadratureConfig& cfg = {});

}  // namespace bhtlab
