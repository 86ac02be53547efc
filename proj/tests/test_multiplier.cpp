#include "bhtlab/multiplier.hpp"
#include "generators.hpp"
#include "reference_values.hpp"

#include <gtest/gtest.h>

#include <numbers>

namespace bhtlab {
namespace {

using namespace bhtlab::testing;

const Grid kSmall(512, 32.0, -16.0);

SampledFunction pointwise_product(const SampledFunction& a, const SampledFunction& b)
{
    std::vector<cplx> v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] * b[j];
    return {a.grid(), std::move(v)};
}

TEST(Symbols, SignAndDecayValues)
{
    auto s = sign_symbol();
    EXPECT_EQ(s(2.0, 1.0), cplx(1.0));
    EXPECT_EQ(s(1.0, 2.0), cplx(-1.0));
    EXPECT_EQ(s(1.5, 1.5), cplx(0.0));
    auto e = exp_decay_symbol(1.0);
    EXPECT_EQ(e(1.0, 1.0), cplx(0.0));
    // (0, 1): |xi| = 1, dist = 1/sqrt2
    EXPECT_NEAR(e(0.0, 1.0).real(), std::exp(-std::numbers::sqrt2), 1e-15);
    EXPECT_THROW(exp_decay_symbol(-1.0), std::domain_error);
    EXPECT_EQ(scaled(s, cplx(0, 2))(3.0, 1.0), cplx(0, 2));
    EXPECT_NEAR(distance_to_diagonal(0.0, 2.0), std::numbers::sqrt2, 1e-15);
}

TEST(Multiplier, ConstantSymbolIsPointwiseProduct)
{
    auto f1 = gaussian_tone(kSmall, 1.0, 0.3);
    auto f2 = gaussian_tone(kSmall, -0.5, -0.4);
    auto out = apply_bilinear_multiplier(constant_symbol(1.0), f1, f2);
    EXPECT_LT(max_abs_diff(out.value.values(), pointwise_product(f1, f2).values()), 1e-12);
    EXPECT_FALSE(out.band_limit_warning);
}

TEST(Multiplier, SeparatedTonesPickUpTheSign)
{
    // Spectra near +3 and -3 never meet the diagonal, so sgn is constant on the product support.
    auto hi = gaussian_tone(kSmall, 3.0, 0.0, 2.0);
    auto lo = gaussian_tone(kSmall, -3.0, 0.5, 2.0);
    auto prod = pointwise_product(hi, lo);
    auto plus = apply_bilinear_multiplier(sign_symbol(), hi, lo).value;
    auto minus = apply_bilinear_multiplier(sign_symbol(), lo, hi).value;
    EXPECT_LT(max_abs_diff(plus.values(), prod.values()), 1e-12);
    std::vector<cplx> neg(prod.values().begin(), prod.values().end());
    for (auto& v : neg) v = -v;
    EXPECT_LT(max_abs_diff(minus.values(), neg), 1e-12);
}

TEST(Multiplier, RejectsMismatchedGrids)
{
    Grid other(512, 16.0, -8.0);
    EXPECT_THROW(apply_bilinear_multiplier(sign_symbol(), gaussian_tone(kSmall, 0, 0), gaussian_tone(other, 0, 0)),
                 std::invalid_argument);
}

TEST(Multiplier, WarnsNearNyquist)
{
    // Nyquist of kSmall is 8.
    auto f = gaussian_tone(kSmall, 7.6, 0.0, 2.0);
    auto g = gaussian_tone(kSmall, 0.0, 0.0);
    EXPECT_TRUE(apply_bilinear_multiplier(sign_symbol(), f, g).band_limit_warning);
    EXPECT_GT(top_band_energy_fraction(forward_transform(f)), 0.1);
    EXPECT_NEAR(max_active_frequency(forward_transform(g), 1e-3), std::sqrt(3.0 * std::log(10.0) / std::numbers::pi),
                1.0 / 32.0 + 1e-12);
}

// Property: the sign multiplier is antisymmetric in its arguments and bilinear.
TEST(MultiplierProperty, AntisymmetryAndBilinearity)
{
    for (std::uint64_t trial = 0; trial < 6; ++trial) {
        RandomStream rs(21, trial);
        auto a = random_band_limited(kSmall, rs, 3.0);
        auto b = random_band_limited(kSmall, rs, 3.0);
        auto c = random_band_limited(kSmall, rs, 3.0);
        cplx lambda = rs.complex_normal();
        auto ab = apply_bilinear_multiplier(sign_symbol(), a, b).value;
        auto ba = apply_bilinear_multiplier(sign_symbol(), b, a).value;
        double scale = lp_quasinorm(ab, 2.0);
        for (std::size_t j = 0; j < ab.size(); ++j) EXPECT_NEAR(std::abs(ab[j] + ba[j]), 0.0, 1e-12 * scale);

        std::vector<cplx> mix(a.size());
        for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = a[j] + lambda * c[j];
        auto lhs = apply_bilinear_multiplier(sign_symbol(), SampledFunction(kSmall, mix), b).value;
        auto cb = apply_bilinear_multiplier(sign_symbol(), c, b).value;
        for (std::size_t j = 0; j < lhs.size(); ++j)
            EXPECT_NEAR(std::abs(lhs[j] - ab[j] - lambda * cb[j]), 0.0, 1e-11 * (1 + std::abs(lambda)) * scale);
    }
}

// Frozen values of the principal value integral from the independent quadrature oracle.
TEST(Multiplier, SpectralSignMatchesFrozenPrincipalValue)
{
    const Grid g = oracle_grid();
    auto f1 = gaussian_tone(g, 1.25, 0.3);
    auto f2 = gaussian_tone(g, -0.75, -0.2);
    auto out = apply_bilinear_multiplier(sign_symbol(), f1, f2).value;
    const std::array<double, 3> xs{0.0, 0.5, -1.0};
    const std::array<cplx, 3> periodic{cplx(kPeriodicBhtRe0, kPeriodicBhtIm0),
                                       cplx(kPeriodicBhtRe1, kPeriodicBhtIm1),
                                       cplx(kPeriodicBhtRe2, kPeriodicBhtIm2)};
    const std::array<cplx, 3> line{cplx(kPvBhtRe0, kPvBhtIm0), cplx(kPvBhtRe1, kPvBhtIm1),
                                   cplx(kPvBhtRe2, kPvBhtIm2)};
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::size_t j = static_cast<std::size_t>(std::lround((xs[i] - g.left()) / g.spacing()));
        ASSERT_DOUBLE_EQ(g.x(j), xs[i]);
        // Exact against the periodic kernel; the line kernel differs by the periodization.
        EXPECT_NEAR(std::abs(kPvToSpectral * out[j] - periodic[i]), 0.0, 1e-9) << "x = " << xs[i];
        EXPECT_NEAR(std::abs(kPvToSpectral * out[j] - line[i]), 0.0, 1e-6) << "x = " << xs[i];
    }
}

TEST(Quadrature, MatchesFrozenPrincipalValue)
{
    const Grid g = oracle_grid();
    auto f1 = gaussian_tone(g, 1.25, 0.3);
    auto f2 = gaussian_tone(g, -0.75, -0.2);
    const std::vector<double> xs{0.0, 0.5, -1.0, 0.013};
    auto got = bht_timedomain(f1, f2, PvQuadratureConfig{}, xs);
    const std::array<cplx, 3> ref{cplx(kPvBhtRe0, kPvBhtIm0), cplx(kPvBhtRe1, kPvBhtIm1),
                                  cplx(kPvBhtRe2, kPvBhtIm2)};
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(std::abs(got[i] - ref[i]), 0.0, 1e-5) << i;
    // Off-grid point goes through the interpolant; compare with the spectral engine's interpolant.
    auto spec = forward_transform(apply_bilinear_multiplier(sign_symbol(), f1, f2).value);
    EXPECT_NEAR(std::abs(got[3] - kPvToSpectral * spec.evaluate(0.013)), 0.0, 1e-5);
}

TEST(Quadrature, ConfigValidation)
{
    PvQuadratureConfig c;
    EXPECT_NO_THROW(c.validate());
    c.eta = 1e-3;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.eta = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.tmax = c.eta / 2;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.nodes_per_decade = 4;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.gauss_points = 1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Quadrature, PointsOutsidePeriodRejected)
{
    auto f = gaussian_tone(kSmall, 0.0, 0.0);
    std::vector<double> xs{100.0};
    EXPECT_THROW(bht_timedomain(f, f, PvQuadratureConfig{}, xs), std::invalid_argument);
}

TEST(Quadrature, OracleSuiteSmallRun)
{
    auto cases = oracle_suite(2, 5);
    ASSERT_EQ(cases.size(), 2u);
    for (const auto& c : cases) {
        EXPECT_GE(c.case_id, 1);
        EXPECT_LT(c.rel_l2_err, kOracleTolerance);
    }
    EXPECT_THROW(oracle_suite(0, 1), std::invalid_argument);
}

TEST(SymbolClass, FittedConstantVerifiesAndDiagonalIsSkipped)
{
    std::vector<std::pair<double, double>> pts{{0.0, 1.0}, {0.3, 1.2}, {-0.5, 2.0}, {1.0, 1.0}, {0.9, 1.0}};
    for (double delta : {0.5, 1.0, 2.0}) {
        auto m = exp_decay_symbol(delta);
        double c = fit_symbol_constant(m, pts, 2);
        auto rep = verify_symbol_class(m, pts, 2, c);
        EXPECT_TRUE(rep.pass);
        ASSERT_EQ(rep.skipped.size(), 1u);
        EXPECT_EQ(rep.skipped[0], std::make_pair(1.0, 1.0));
        EXPECT_EQ(rep.rows.size(), 4u * 6u);
        EXPECT_FALSE(verify_symbol_class(m, pts, 2, 0.5 * c).pass);
    }
    EXPECT_THROW(fit_symbol_constant(sign_symbol(), pts, 3), std::invalid_argument);
}

TEST(SymbolClass, SignSymbolHasFlatDerivativesAwayFromDiagonal)
{
    std::vector<std::pair<double, double>> pts{{0.0, 1.0}, {2.0, -1.0}};
    auto rep = verify_symbol_class(sign_symbol(), pts, 2, 1.0);
    EXPECT_TRUE(rep.pass);
    for (const auto& row : rep.rows)
        if (row.alpha1 + row.alpha2 > 0) {
            EXPECT_EQ(row.derivative, 0.0);
        }
}

TEST(Symbols, ValuesAtSpecificPoints)
{
    // (1, 0): |xi| = 1 and dist = 1/sqrt2.
    EXPECT_NEAR(exp_decay_symbol(1.0)(1.0, 0.0).real(), std::exp(-std::numbers::sqrt2), 1e-15);
    EXPECT_NEAR(std::exp(-std::numbers::sqrt2), 0.2431, 1e-4);
    EXPECT_EQ(sign_symbol()(1.0, 2.0), cplx(-1.0));
    std::vector<std::pair<double, double>> pts{{1.0, 0.0}, {-2.0, 0.5}};
    auto rep = verify_symbol_class(constant_symbol(1.0), pts, 1, 1.0);
    for (const auto& row : rep.rows)
        if (row.alpha1 + row.alpha2 == 1) {
            EXPECT_EQ(row.derivative, 0.0);
            EXPECT_EQ(row.ratio, 0.0);
        }
}

// Property: the closed-form distance agrees with brute-force minimization along the diagonal.
TEST(SymbolsProperty, DistanceMatchesBruteForce)
{
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        RandomStream rs(21, trial);
        double a = rs.uniform(-5.0, 5.0), b = rs.uniform(-5.0, 5.0);
        auto dist_at = [&](double t) { return std::hypot(a - t, b - t); };
        // Golden-section search on the convex distance along (t, t).
        double lo = -10.0, hi = 10.0;
        const double r = std::numbers::phi - 1.0;
        for (int it = 0; it < 200; ++it) {
            double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
            if (dist_at(m1) < dist_at(m2)) hi = m2;
            else lo = m1;
        }
        EXPECT_NEAR(distance_to_diagonal(a, b), dist_at(0.5 * (lo + hi)), 1e-9);
    }
}

TEST(Multiplier, SignIsConstantOnSeparatedCompactSpectra)
{
    RandomStream rs(22, 0);
    std::vector<cplx> c1(kSmall.size()), c2(kSmall.size());
    for (std::size_t i = 0; i < kSmall.size(); ++i) {
        double xi = kSmall.frequency(i);
        if (xi >= 2.0 && xi <= 3.0) c1[i] = rs.complex_normal();
        if (xi >= -1.0 && xi <= 1.0) c2[i] = rs.complex_normal();
    }
    auto f1 = inverse_transform(Spectrum(kSmall, c1));
    auto f2 = inverse_transform(Spectrum(kSmall, c2));
    auto out = apply_bilinear_multiplier(sign_symbol(), f1, f2).value;
    auto prod = pointwise_product(f1, f2);
    double scale = lp_quasinorm(prod, 2.0);
    EXPECT_LT(max_abs_diff(out.values(), prod.values()), 1e-12 * scale);
}

// Property: the output spectrum lives on the sum of the input supports.
TEST(MultiplierProperty, FrequencySupportMapping)
{
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        RandomStream rs(23, trial);
        double a = rs.uniform(-3.0, 1.0), b = rs.uniform(-3.0, 1.0);
        std::vector<cplx> c1(kSmall.size()), c2(kSmall.size());
        for (std::size_t i = 0; i < kSmall.size(); ++i) {
            double xi = kSmall.frequency(i);
            if (xi >= a && xi <= a + 1.0) c1[i] = rs.complex_normal();
            if (xi >= b && xi <= b + 2.0) c2[i] = rs.complex_normal();
        }
        auto out = apply_bilinear_multiplier(exp_decay_symbol(0.5), inverse_transform(Spectrum(kSmall, c1)),
                                             inverse_transform(Spectrum(kSmall, c2)))
                       .value;
        Spectrum s = forward_transform(out);
        double inside = 0.0, outside = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            double xi = kSmall.frequency(i);
            (xi >= a + b - 1e-9 && xi <= a + b + 3.0 + 1e-9 ? inside : outside) += std::norm(s[i]);
        }
        EXPECT_LE(outside, 1e-24 * inside);
    }
}

TEST(Quadrature, EvenEqualInputsVanishAtTheCenter)
{
    const Grid g = oracle_grid();
    auto f = gaussian_tone(g, 0.0, 0.0);
    const std::vector<double> xs{0.0};
    EXPECT_EQ(std::abs(bht_timedomain(f, f, PvQuadratureConfig{}, xs)[0]), 0.0);
}

TEST(Quadrature, InnerCutoffConvergence)
{
    const Grid g = oracle_grid();
    auto f1 = gaussian_tone(g, 1.25, 0.3);
    auto f2 = gaussian_tone(g, -0.75, -0.2);
    const std::vector<double> xs{0.0, 0.5, -1.0, 0.25};
    PvQuadratureConfig coarse, fine;
    coarse.eta = 4e-7;
    fine.eta = 1e-7;
    auto a = bht_timedomain(f1, f2, coarse, xs);
    auto b = bht_timedomain(f1, f2, fine, xs);
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        diff += std::norm(a[i] - b[i]);
        norm += std::norm(b[i]);
    }
    EXPECT_LT(std::sqrt(diff / norm), 1e-4);
    // An inner cutoff too coarse for the input's top frequency is rejected.
    Grid fast(4096, 2.0, -1.0);
    PvQuadratureConfig wide;
    wide.eta = 1e-4;
    const std::vector<double> origin{0.0};
    EXPECT_THROW(bht_timedomain(gaussian_tone(fast, 1005.0, 0.0, 0.5), gaussian_tone(fast, 0.0, 0.0, 0.5), wide, origin),
                 std::domain_error);
}

}  // namespace
}  // namespace bhtlab
