#include "bhtlab/counterexample.hpp"
#include "bhtlab/multiplier.hpp"
#include "generators.hpp"
#include "reference_values.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bhtlab {
namespace {

using namespace bhtlab::testing;

const BumpPair& small_bumps()
{
    static const BumpPair b = make_bump_pair(counterexample_grid(2));
    return b;
}

TEST(Bumps, ValueAtCenterMatchesOracle)
{
    const BumpPair& b = small_bumps();
    const Grid& g = b.phi1.grid();
    std::size_t j0 = static_cast<std::size_t>(std::lround(-g.left() / g.spacing()));
    ASSERT_DOUBLE_EQ(g.x(j0), 0.0);
    EXPECT_NEAR(b.phi1[j0].real(), kBumpAtZero, 1e-6 * kBumpAtZero);
    // Unit L1 norm on a fine grid; the working grid's Riemann sum is close but not exact.
    EXPECT_NEAR(lp_quasinorm(make_bump_pair(Grid(std::size_t{1} << 18, kCounterexamplePeriod, -32.0)).phi1, 1.0),
                1.0, 1e-12);
    EXPECT_NEAR(lp_quasinorm(b.phi1, 1.0), 1.0, 1e-5);
    // Even and real.
    for (std::size_t j = 1; j < g.size(); ++j) EXPECT_NEAR(b.phi1[j].real(), b.phi1[g.size() - j].real(), 1e-13);
    EXPECT_LT(max_abs_diff(b.phi1.values(), b.phi2.values()), 1e-15);
}

TEST(Bumps, SpectrumSupportedInHalfBand)
{
    const Spectrum& s = small_bumps().spectrum1;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s.grid().frequency(i)) >= 0.5) {
            EXPECT_EQ(s[i], cplx{});
        }
}

TEST(Bumps, GridRequirements)
{
    EXPECT_THROW(make_bump_pair(Grid(4096, 32.0, -16.0)), std::invalid_argument);
    EXPECT_THROW(make_bump_pair(Grid(64, 64.0, -32.0)), std::invalid_argument);
    EXPECT_EQ(required_samples(1), 1024u);    // 6.5 * 64 = 416 < 512
    EXPECT_EQ(required_samples(8), 8192u);    // 48.5 * 64 = 3104 < 4096
    EXPECT_EQ(required_samples(128), 131072u);
    EXPECT_THROW(make_family(small_bumps(), 64, rademacher_signs(64, 1, 0)), BandwidthError);
    try {
        make_family(small_bumps(), 64, rademacher_signs(64, 1, 0));
    } catch (const BandwidthError& e) {
        EXPECT_EQ(e.required_samples(), required_samples(64));
    }
}

TEST(Intervals, SystemLayout)
{
    auto iv = interval_system(1);
    ASSERT_EQ(iv.size(), 2u);
    EXPECT_DOUBLE_EQ(iv[0].lo, 0.375 - 1.0 / 64.0);
    EXPECT_DOUBLE_EQ(iv[1].hi, 0.625 + 1.0 / 64.0);
    EXPECT_DOUBLE_EQ(iv[0].length(), 1.0 / 32.0);
    EXPECT_THROW(interval_system(0), std::invalid_argument);
    for (int n : {2, 8, 128}) {
        auto s = interval_system(n);
        ASSERT_EQ(s.size(), 2u * n);
        for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LT(s[i - 1].hi, s[i].lo);
    }
}

TEST(Product, MinimumOnLargestSystemMatchesOracle)
{
    const BumpPair b = make_bump_pair(Grid(1024, kCounterexamplePeriod, -32.0));
    auto iv = interval_system(128);
    std::vector<double> edges;
    for (const auto& i : iv) {
        edges.push_back(i.lo);
        edges.push_back(i.hi);
    }
    auto vals = product_profile(b, edges);
    double m = HUGE_VAL;
    for (const auto& v : vals) m = std::min(m, std::abs(v));
    EXPECT_NEAR(m, kMinProductOn128, 2e-6 * kMinProductOn128);
}

// Property: each demodulated term equals the product profile, whatever k and its sign.
TEST(FamilyProperty, DemodulatedTermsFactorize)
{
    for (int n : {1, 2}) {
        const BumpPair b = make_bump_pair(counterexample_grid(n));
        for (int sign : {1, -1}) {
            std::vector<int> eps(static_cast<std::size_t>(n), sign);
            RandomFamily fam = make_family(b, n, eps);
            const Grid& g = fam.f.grid();
            std::vector<double> xs;
            std::vector<std::size_t> js;
            for (const auto& iv : interval_system(n))
                for (std::size_t j = 0; j < g.size(); ++j)
                    if (g.x(j) >= iv.lo && g.x(j) <= iv.hi) {
                        xs.push_back(g.x(j));
                        js.push_back(j);
                    }
            ASSERT_FALSE(xs.empty());
            auto ref = product_profile(b, xs);
            for (int k = 1; k <= n; ++k) {
                auto d = demodulated_profile(fam, k);
                for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(std::abs(d[js[i]] - ref[i]), 0.0, 1e-6);
            }
        }
    }
}

TEST(Family, SumMatchesMaterializedFamily)
{
    const BumpPair& b = small_bumps();
    auto eps = rademacher_signs(2, 3, 0);
    RandomFamily fam = make_family(b, 2, eps);
    auto sum = family_sum(b, 2, eps);
    std::vector<cplx> ref(sum.size());
    for (const auto& gk : fam.g)
        for (std::size_t j = 0; j < ref.size(); ++j) ref[j] += gk[j];
    EXPECT_LT(max_abs_diff(sum.values(), ref), 1e-13);
    std::vector<int> bad{1, 0};
    EXPECT_THROW(make_family(b, 2, bad), std::invalid_argument);
    EXPECT_THROW(make_family(b, 3, eps), std::invalid_argument);
    EXPECT_THROW(demodulated_profile(fam, 3), std::invalid_argument);
}

TEST(Signs, DeterministicAndBalanced)
{
    EXPECT_EQ(rademacher_signs(50, 7, 2), rademacher_signs(50, 7, 2));
    EXPECT_NE(rademacher_signs(50, 7, 2), rademacher_signs(50, 7, 3));
    int plus = 0;
    for (std::uint64_t s = 0; s < 100; ++s)
        for (int e : rademacher_signs(100, 1, s)) plus += e > 0;
    EXPECT_NEAR(plus / 10000.0, 0.5, 0.02);
}

TEST(Khinchine, ExactMatchesOracle)
{
    std::vector<double> a{1, 2, 3, 4, 5};
    EXPECT_NEAR(khinchine_exact(a, 0.6), kKhinchine5r06, 1e-14);
    EXPECT_NEAR(khinchine_exact(a, 1.5), kKhinchine5r15, 1e-14);
    std::vector<double> ones(8, 1.0);
    EXPECT_NEAR(khinchine_exact(ones, 1.0), kKhinchine8r1, 1e-14);
    // r = 2 is the orthogonality identity.
    EXPECT_NEAR(khinchine_exact(a, 2.0), 1.0, 1e-14);
    std::vector<double> single{-3.0};
    EXPECT_DOUBLE_EQ(khinchine_exact(single, 0.6), 1.0);
    std::vector<double> zeros(3, 0.0), big(25, 1.0);
    EXPECT_THROW(khinchine_exact(zeros, 1.0), std::invalid_argument);
    EXPECT_THROW(khinchine_exact(big, 1.0), std::invalid_argument);
}

// Property: sharp lower constant 2^{r/2 - 1} for r below 1.8 and the upper bound 1 for r <= 2.
TEST(KhinchineProperty, RatioBoundsAndEstimateAgreement)
{
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        RandomStream rs(31, trial);
        std::size_t n = 1 + rs.below(12);
        auto a = random_coefficients(rs, n);
        double r = rs.uniform(0.3, 1.8);
        double exact = khinchine_exact(a, r);
        EXPECT_GE(exact, std::pow(2.0, r / 2.0 - 1.0) * (1 - 1e-12));
        EXPECT_LE(exact, 1.0 + 1e-12);
        auto est = khinchine_ratio(a, r, 2000, trial);
        EXPECT_LE(std::abs(est.ratio - exact), 3.0 * est.sigma + 1e-12) << "n = " << n << " r = " << r;
        EXPECT_NEAR(est.ci, 1.96 * est.sigma, 1e-15);
    }
    std::vector<double> a{1.0};
    EXPECT_THROW(khinchine_ratio(a, 1.0, 99, 1), std::invalid_argument);
    EXPECT_THROW(khinchine_ratio(a, 0.0, 100, 1), std::domain_error);
}

// Property: for r0 = 2 the Monte Carlo mean agrees with the closed-form expectation.
TEST(ExpectationProperty, SquareNormMatchesClosedForm)
{
    const BumpPair& b = small_bumps();
    ExpectationOptions opt;
    opt.r0 = 2.0;
    opt.n_list = {1, 2};
    opt.trials = 400;
    opt.nodes_per_interval = 16;
    opt.bootstrap_resamples = 50;
    auto res = expectation_experiment(b, opt);
    EXPECT_LT(res.guard_error, 1e-6);
    for (std::size_t i = 0; i < opt.n_list.size(); ++i) {
        double exact = expected_square_norm(b, opt.n_list[i], opt.nodes_per_interval);
        const auto& row = res.report.rows[i];
        EXPECT_LE(std::abs(row.value - exact), 4.0 * row.std_error + 1e-12 * exact) << "N = " << opt.n_list[i];
    }
}

TEST(Expectation, SingleTrialHasUnboundedInterval)
{
    ExpectationOptions opt;
    opt.n_list = {1, 2};
    opt.trials = 1;
    opt.run_guard = false;
    auto res = expectation_experiment(small_bumps(), opt);
    EXPECT_TRUE(std::isinf(res.report.slope_ci));
    opt.n_list = {1};
    EXPECT_THROW(expectation_experiment(small_bumps(), opt), std::invalid_argument);
}

TEST(FlNorm, SlopeIsExactlyDualExponent)
{
    const BumpPair& b = small_bumps();
    std::vector<int> ns{1, 2};
    for (double q0 : {1.2, 2.0, 4.0}) {
        auto rep = fl_norm_experiment(b, q0, ns, 1);
        EXPECT_NEAR(rep.slope, 1.0 - 1.0 / q0, 1e-10);
    }
    EXPECT_THROW(fl_norm_experiment(b, 1.0, ns, 1), std::domain_error);
}

TEST(Verdict, ClassificationRule)
{
    EXPECT_EQ(classify_exponents(0.3, 0.1, 0.05), "unbounded");
    EXPECT_EQ(classify_exponents(0.1, 0.3, 0.05), "no contradiction");
    EXPECT_EQ(classify_exponents(0.3, 0.28, 0.05), "inconclusive");

    ScalingReport e{"expectation", {{8, 1, 0}, {16, 1, 0}}, 0.3, 0.01, 1};
    ScalingReport f{"fl_norm", {{8, 1, 0}, {16, 1, 0}}, 1.0 / 6.0, 0.0, 1};
    Verdict v = contradiction_summary(e, f, 0.6, 1.2);
    EXPECT_EQ(v.verdict, "unbounded");
    EXPECT_EQ(v.predicted, "unbounded");
    EXPECT_NEAR(v.upper, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(v.margin, kExponentTolerance);
    Verdict w = contradiction_summary(e, ScalingReport{"fl_norm", f.rows, 0.75, 0.0, 1}, 0.6, 4.0);
    EXPECT_EQ(w.predicted, "no contradiction");
    ScalingReport g{"fl_norm", {{8, 1, 0}, {32, 1, 0}}, 0.1, 0.0, 1};
    EXPECT_THROW(contradiction_summary(e, g, 0.6, 1.2), std::invalid_argument);
}

TEST(Family, SpectraSitAtTheirCenters)
{
    const BumpPair& b = small_bumps();
    std::vector<int> plus{1};
    RandomFamily one = make_family(b, 1, plus);
    Spectrum s = forward_transform(one.g[0]);
    double mass = 0.0, outside = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double w = std::norm(s[i]);
        mass += w;
        double xi = s.grid().frequency(i);
        if (xi < 5.5 || xi > 6.5) outside += w;
    }
    EXPECT_LT(outside, 1e-24 * mass);
    EXPECT_DOUBLE_EQ(family_center(1, 1, 1), 6.0);
    EXPECT_DOUBLE_EQ(family_center(1, -1, 2), -6.0);
    EXPECT_DOUBLE_EQ(family_center(2, -1, 2), -4.0);

    // Modulation leaves every Lp norm alone.
    auto eps = rademacher_signs(2, 11, 0);
    RandomFamily two = make_family(b, 2, eps);
    for (double p : {0.6, 1.0, 2.0})
        for (const auto& gk : two.g) EXPECT_NEAR(lp_quasinorm(gk, p), lp_quasinorm(b.phi2, p), 1e-10);
}

TEST(Bumps, ValueAtZeroIsSpectrumMass)
{
    const BumpPair& b = small_bumps();
    const Grid& g = b.phi1.grid();
    cplx mass{};
    for (auto c : b.spectrum1.coeffs()) mass += c;
    mass /= g.period();
    std::size_t j0 = static_cast<std::size_t>(std::lround(-g.left() / g.spacing()));
    EXPECT_NEAR(std::abs(b.phi1[j0] - mass), 0.0, 1e-12);
    EXPECT_GT(mass.real(), 0.0);
}

// A nonnegative spectrum does not make the profile positive: it is positive up to its first
// zero, which is far outside every shifted interval system, and has a negative side lobe.
TEST(Bumps, PositiveUpToFirstZeroWithNegativeSideLobe)
{
    const BumpPair& b = small_bumps();
    const Grid& g = b.phi1.grid();
    double lowest = HUGE_VAL;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g.x(j)) < kBumpFirstZero - 1e-3) {
            EXPECT_GT(b.phi1[j].real(), 0.0) << g.x(j);
        }
        lowest = std::min(lowest, b.phi1[j].real());
    }
    EXPECT_NEAR(b.spectrum1.evaluate(kBumpMinimumAt).real(), kBumpMinimum, 1e-5 * std::abs(kBumpMinimum));
    EXPECT_GE(lowest, kBumpMinimum * (1 + 1e-5));
    EXPECT_LT(b.spectrum1.evaluate(kBumpFirstZero - 0.01).real() * b.spectrum1.evaluate(kBumpFirstZero + 0.01).real(),
              0.0);
}

TEST(Product, ProfileAtHalfIsProductOfPeaks)
{
    const BumpPair& b = small_bumps();
    const Grid& g = b.phi1.grid();
    std::size_t j0 = static_cast<std::size_t>(std::lround(-g.left() / g.spacing()));
    std::vector<double> half{0.5};
    auto v = product_profile(b, half);
    EXPECT_NEAR(std::abs(v[0] - b.phi1[j0] * b.phi2[j0]), 0.0, 1e-12);
    // The demodulated term at x = 1/2 agrees with it too.
    std::vector<int> minus{-1};
    RandomFamily fam = make_family(b, 1, minus);
    auto d = demodulated_profile(fam, 1);
    std::size_t jh = static_cast<std::size_t>(std::lround((0.5 - g.left()) / g.spacing()));
    ASSERT_DOUBLE_EQ(g.x(jh), 0.5);
    EXPECT_NEAR(std::abs(d[jh] - v[0]), 0.0, 1e-6);
}

TEST(Intervals, CosineFactorStaysAboveNineTenths)
{
    for (int n : {1, 2, 8, 128}) {
        double lowest = HUGE_VAL;
        for (const auto& iv : interval_system(n))
            for (int s = 0; s <= 64; ++s)
                lowest = std::min(lowest, std::abs(std::cos(8.0 * n * std::numbers::pi * (iv.lo + s * iv.length() / 64.0))));
        EXPECT_GT(lowest, 0.9);
        EXPECT_NEAR(lowest, std::cos(std::numbers::pi / 8.0), 1e-9) << n;
    }
}

TEST(Intervals, TotalMeasureIsOneSixteenth)
{
    for (int n : {1, 3, 8, 64, 128}) {
        double total = 0.0;
        for (const auto& iv : interval_system(n)) total += iv.length();
        EXPECT_NEAR(total, 1.0 / 16.0, 1e-15) << n;
    }
}

// The product is positive on every system, and on the largest one its minimum sits at the edges.
TEST(Intervals, ProductIsBoundedBelowOnEverySystem)
{
    const BumpPair& b = small_bumps();
    for (int n : {1, 8, 128}) {
        std::vector<double> xs;
        for (const auto& iv : interval_system(n))
            for (int s = 0; s <= 8; ++s) xs.push_back(iv.lo + s * iv.length() / 8.0);
        for (const auto& v : product_profile(b, xs)) {
            EXPECT_GT(std::abs(v), 0.1);
            if (n == 128) {
                EXPECT_GE(std::abs(v), kMinProductOn128 * (1 - 2e-6));
            }
        }
    }
}

TEST(FlNorm, DisjointSupportsAddUp)
{
    const BumpPair& b = small_bumps();
    const double qp = 4.0;
    double single = flp_norm(b.phi2, qp);
    std::vector<int> ns{1, 2};
    auto rep = fl_norm_experiment(b, 4.0 / 3.0, ns, 5);
    EXPECT_NEAR(rep.rows[0].value, single, 1e-12 * single);
    EXPECT_NEAR(std::pow(rep.rows[1].value, qp), 2.0 * std::pow(single, qp), 1e-10 * std::pow(single, qp));

    // Direct sum over the materialized spectra.
    auto eps = rademacher_signs(2, 5, 0xf1);
    RandomFamily fam = make_family(b, 2, eps);
    double direct = 0.0;
    for (const auto& gk : fam.g) direct += std::pow(flp_norm(gk, qp), qp);
    EXPECT_NEAR(std::pow(rep.rows[1].value, qp), direct, 1e-10 * direct);
}

TEST(Khinchine, SingleTermAndOnes)
{
    std::vector<double> one{2.5};
    for (double r : {0.6, 1.0, 1.7}) {
        auto e = khinchine_ratio(one, r, 100, 4);
        EXPECT_NEAR(e.ratio, 1.0, 1e-14);
    }
    std::vector<double> ones(16, 1.0);
    auto e = khinchine_ratio(ones, 2.0, 4000, 9);
    EXPECT_LE(std::abs(e.ratio - 1.0), 3.0 * e.sigma);
}

// Property: fixed r = 0.6 ratios stay inside the interval fitted by enumeration at small N.
TEST(KhinchineProperty, UniformOverLength)
{
    const double lo = std::pow(2.0, -0.7);
    for (std::size_t n : {8u, 16u, 32u, 64u, 128u}) {
        RandomStream rs(77, n);
        auto a = random_coefficients(rs, n);
        auto e = khinchine_ratio(a, 0.6, 4000, n);
        EXPECT_GE(e.ratio + 3.0 * e.sigma, lo) << n;
        EXPECT_LE(e.ratio - 3.0 * e.sigma, 1.0) << n;
        EXPECT_GT(e.ratio, 0.5);
        EXPECT_LT(e.ratio, 1.5);
    }
}

}  // namespace
}  // namespace bhtlab
