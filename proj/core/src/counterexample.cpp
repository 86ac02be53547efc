#include "bhtlab/counterexample.hpp"

#include "bhtlab/multiplier.hpp"
#include "bhtlab/parallel.hpp"
#include "bhtlab/random.hpp"
#include "bhtlab/stats.hpp"
#include "bhtlab/summation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

namespace bhtlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx turn(double turns) { return std::polar(1.0, kTwoPi * std::remainder(turns, 1.0)); }

// e^{2 pi i f x_j} for integer f, reduced so large f * x_j keeps full accuracy.
cplx grid_tone(const Grid& g, double f, std::size_t j)
{
    const double a = std::remainder(f * g.left(), 1.0);
    const double b = std::remainder(f * static_cast<double>(j) * g.spacing(), 1.0);
    return turn(a + b);
}

void require_band(const Grid& g, int n)
{
    const double top = 6.0 * n + 0.5;
    if (!g.resolves(top)) {
        const std::size_t need = required_samples(n, g.period());
        throw BandwidthError("grid of " + std::to_string(g.size()) + " samples cannot carry frequencies up to " +
                                 std::to_string(top) + "; need M >= " + std::to_string(need),
                             need);
    }
}

struct Nodes {
    std::vector<double> x;
    std::vector<double> w;
};

Nodes interval_nodes(int n, int per_interval)
{
    Nodes nodes;
    for (const Interval& iv : interval_system(n)) {
        const double w = iv.length() / per_interval;
        for (int q = 0; q < per_interval; ++q) {
            nodes.x.push_back(iv.lo + (q + 0.5) * w);
            nodes.w.push_back(w);
        }
    }
    return nodes;
}

// sum_k eps_k e^{4 pi i (k + 2 eps_k N) x}
cplx signed_sum(std::span<const int> eps, int n, double x)
{
    const cplx z = turn(2.0 * x);
    const cplx up = turn(4.0 * n * x);
    const cplx down = std::conj(up);
    cplx plus, minus, zk = z;
    for (int k = 1; k <= n; ++k) {
        if (eps[static_cast<std::size_t>(k - 1)] > 0) plus += zk;
        else minus += zk;
        zk *= z;
    }
    return up * plus - down * minus;
}

}  // namespace

std::size_t required_samples(int n, double period)
{
    const double top = (6.0 * n + 0.5) * period;
    std::size_t m = 8;
    while (static_cast<double>(m / 2) <= top) m *= 2;
    return m;
}

Grid counterexample_grid(int max_n, double period)
{
    return {required_samples(max_n, period), period, -period / 2.0};
}

namespace {
constexpr std::size_t kL1NormSamples = std::size_t{1} << 18;
}  // namespace

BumpPair make_bump_pair(const Grid& grid)
{
    const long half = static_cast<long>(std::floor(grid.period() / 2.0));
    if (2 * half + 1 < 64) throw std::invalid_argument("grid resolves fewer than 64 frequency samples in [-1/2, 1/2]");
    if (!grid.resolves(0.5)) throw std::invalid_argument("grid band does not reach 1/2");

    auto spectrum_on = [](const Grid& g) {
        std::vector<cplx> coeffs(g.size());
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            const double xi = g.frequency(i);
            if (std::abs(xi) < 0.5) coeffs[i] = std::exp(-1.0 / (0.25 - xi * xi));
        }
        return Spectrum(g, std::move(coeffs));
    };
    // L1 normalization on a fine grid of the same period, whatever the caller's sample count.
    const Grid fine(std::max<std::size_t>(grid.size(), kL1NormSamples), grid.period(), grid.left());
    const double l1 = lp_quasinorm(inverse_transform(spectrum_on(fine)), 1.0);

    auto build = [&] {
        Spectrum s = spectrum_on(grid);
        for (cplx& c : s.mutable_coeffs()) c /= l1;
        SampledFunction f = inverse_transform(s);
        // The profile is real and even; drop the rounding-level imaginary part.
        for (cplx& v : f.mutable_values()) v = v.real();
        return std::pair{std::move(f), std::move(s)};
    };
    auto [p1, s1] = build();
    auto [p2, s2] = build();
    return {std::move(p1), std::move(p2), std::move(s1), std::move(s2)};
}

RandomFamily make_family(const BumpPair& bumps, int n, std::span<const int> eps)
{
    if (n < 1) throw std::invalid_argument("family size must be positive");
    if (eps.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("sign vector length must equal N");
    for (int e : eps)
        if (e != 1 && e != -1) throw std::invalid_argument("signs must be +1 or -1");
    const Grid& g = bumps.phi1.grid();
    require_band(g, n);

    RandomFamily fam{n, std::vector<int>(eps.begin(), eps.end()), translate(bumps.phi1, 0.5), {}};
    const SampledFunction base = translate(bumps.phi2, 0.5);
    fam.g.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double c = family_center(k, eps[static_cast<std::size_t>(k - 1)], n);
        std::vector<cplx> v(g.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = base[j] * grid_tone(g, c, j);
        fam.g.emplace_back(g, std::move(v));
    }
    return fam;
}

SampledFunction family_sum(const BumpPair& bumps, int n, std::span<const int> eps)
{
    if (eps.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("sign vector length must equal N");
    const Grid& g = bumps.phi2.grid();
    require_band(g, n);
    const SampledFunction base = translate(bumps.phi2, 0.5);
    std::vector<cplx> v(g.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        CompensatedSum<cplx> acc;
        for (int k = 1; k <= n; ++k)
            acc.add(grid_tone(g, family_center(k, eps[static_cast<std::size_t>(k - 1)], n), j));
        v[j] = base[j] * acc.value();
    }
    return {g, std::move(v)};
}

std::vector<Interval> interval_system(int n)
{
    if (n < 1) throw std::invalid_argument("interval system needs N >= 1");
    std::vector<Interval> out;
    const double half = 1.0 / (64.0 * n);
    for (int l = -n; l <= n; ++l) {
        if (l == 0) continue;
        const double c = 0.5 + l / (8.0 * n);
        out.push_back({c - half, c + half});
    }
    return out;
}

SampledFunction demodulated_profile(const RandomFamily& fam, int k)
{
    if (k < 1 || k > fam.n) throw std::invalid_argument("k must lie in [1, N]");
    const SampledFunction& gk = fam.g[static_cast<std::size_t>(k - 1)];
    SampledFunction out = apply_bilinear_multiplier(sign_symbol(), fam.f, gk).value;
    const int e = fam.eps[static_cast<std::size_t>(k - 1)];
    const double c = family_center(k, e, fam.n);
    const Grid& g = out.grid();
    auto& v = out.mutable_values();
    for (std::size_t j = 0; j < v.size(); ++j) v[j] *= -static_cast<double>(e) * std::conj(grid_tone(g, c, j));
    return out;
}

std::vector<cplx> product_profile(const BumpPair& bumps, std::span<const double> x)
{
    std::vector<cplx> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = bumps.spectrum1.evaluate(x[i] - 0.5) * bumps.spectrum2.evaluate(x[i] - 0.5);
    return out;
}

std::vector<int> rademacher_signs(int n, std::uint64_t seed, std::uint64_t stream)
{
    RandomStream rng(seed, stream, static_cast<std::uint64_t>(n));
    std::vector<int> eps(static_cast<std::size_t>(n));
    for (int& e : eps) e = rng.sign();
    return eps;
}

KhinchineEstimate khinchine_ratio(std::span<const double> a, double r, int trials, std::uint64_t seed)
{
    if (!(r > 0.0)) throw std::domain_error("khinchine exponent must be positive");
    if (trials < 100) throw std::invalid_argument("khinchine estimate needs at least 100 trials");
    double energy = 0.0;
    for (double v : a) energy += v * v;
    if (energy == 0.0) throw std::invalid_argument("khinchine coefficients are all zero");

    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(values.size(), [&](std::size_t t) {
        RandomStream rng(seed, t, 0x4b);
        double s = 0.0;
        for (double v : a) s += rng.sign() * v;
        values[t] = std::pow(std::abs(s), r);
    });
    const double norm = std::pow(energy, r / 2.0);
    KhinchineEstimate est;
    est.ratio = mean(values) / norm;
    est.sigma = bootstrap_mean_sigma(values, 400, seed ^ 0x4b4b) / norm;
    est.ci = 1.96 * est.sigma;
    return est;
}

double khinchine_exact(std::span<const double> a, double r)
{
    if (a.size() > 24) throw std::invalid_argument("exhaustive enumeration limited to 24 coefficients");
    double energy = 0.0;
    for (double v : a) energy += v * v;
    if (energy == 0.0) throw std::invalid_argument("khinchine coefficients are all zero");
    const std::uint64_t patterns = std::uint64_t{1} << a.size();
    CompensatedSum<double> acc;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) s += ((mask >> k) & 1U) ? a[k] : -a[k];
        acc.add(std::pow(std::abs(s), r));
    }
    return acc.value() / static_cast<double>(patterns) / std::pow(energy, r / 2.0);
}

double expected_square_norm(const BumpPair& bumps, int n, int nodes_per_interval)
{
    const Nodes nodes = interval_nodes(n, nodes_per_interval);
    const auto omega = product_profile(bumps, nodes.x);
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        const double x = nodes.x[i];
        const cplx z = turn(2.0 * x);
        cplx d, zk = z;
        for (int k = 1; k <= n; ++k, zk *= z) d += zk;
        const double s = std::sin(8.0 * std::numbers::pi * n * x);
        acc.add(nodes.w[i] * std::norm(omega[i]) * (n + s * s * (std::norm(d) - n)));
    }
    return acc.value();
}

ExpectationResult expectation_experiment(const BumpPair& bumps, const ExpectationOptions& opt)
{
    if (!(opt.r0 > 0.0)) throw std::domain_error("r0 must be positive");
    if (opt.trials < 1) throw std::invalid_argument("trials must be positive");
    if (opt.n_list.size() < 2) throw std::invalid_argument("need at least two values of N");
    for (int n : opt.n_list)
        if (n < 1) throw std::invalid_argument("N values must be positive");

    ExpectationResult result;
    result.report.experiment = "expectation";
    result.report.seed = opt.seed;

    if (opt.run_guard) {
        const int n = *std::min_element(opt.n_list.begin(), opt.n_list.end());
        const BumpPair small = make_bump_pair(counterexample_grid(n));
        const auto eps = rademacher_signs(n, opt.seed, 0);
        const RandomFamily fam = make_family(small, n, eps);
        const Grid& g = fam.f.grid();
        std::vector<cplx> engine(g.size());
        for (int k = 1; k <= n; ++k) {
            const auto bht = apply_bilinear_multiplier(sign_symbol(), fam.f, fam.g[static_cast<std::size_t>(k - 1)]);
            for (std::size_t j = 0; j < engine.size(); ++j) engine[j] += bht.value[j];
        }
        double err = 0.0, scale = 0.0;
        for (const Interval& iv : interval_system(n)) {
            for (std::size_t j = 0; j < g.size(); ++j) {
                const double x = g.x(j);
                if (x < iv.lo || x > iv.hi) continue;
                const double xs[1] = {x};
                const cplx fast = -signed_sum(eps, n, x) * product_profile(small, xs)[0];
                err = std::max(err, std::abs(fast - engine[j]));
                scale = std::max(scale, std::abs(fast));
            }
        }
        result.guard_error = scale > 0.0 ? err / scale : err;
        if (result.guard_error > 1e-6)
            throw std::runtime_error("fast path disagrees with the spectral engine: " +
                                     std::to_string(result.guard_error));
    }

    std::vector<double> ns;
    for (int n : opt.n_list) {
        const Nodes nodes = interval_nodes(n, opt.nodes_per_interval);
        const auto omega = product_profile(bumps, nodes.x);
        std::vector<double> weight(nodes.x.size());
        for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = nodes.w[i] * std::pow(std::abs(omega[i]), opt.r0);

        std::vector<double> values(static_cast<std::size_t>(opt.trials));
        parallel_for(values.size(), [&](std::size_t t) {
            const auto eps = rademacher_signs(n, opt.seed, t);
            CompensatedSum<double> acc;
            for (std::size_t i = 0; i < nodes.x.size(); ++i)
                acc.add(weight[i] * std::pow(std::abs(signed_sum(eps, n, nodes.x[i])), opt.r0));
            values[t] = acc.value();
        });
        result.report.rows.push_back({static_cast<double>(n), mean(values), standard_error(values)});
        result.trial_values.push_back(std::move(values));
        ns.push_back(n);
    }

    std::vector<double> means;
    for (const auto& row : result.report.rows) means.push_back(row.value);
    result.report.slope = loglog_fit(ns, means).slope;
    result.report.slope_ci = opt.trials < 2
                                 ? std::numeric_limits<double>::infinity()
                                 : 1.96 * bootstrap_slope_sigma(ns, result.trial_values, opt.bootstrap_resamples,
                                                                opt.seed ^ 0xe5);
    return result;
}

ScalingReport fl_norm_experiment(const BumpPair& bumps, double q0, std::span<const int> n_list, std::uint64_t seed)
{
    if (!(q0 > 1.0)) throw std::domain_error("fl-norm experiment needs q0 > 1");
    if (n_list.size() < 2) throw std::invalid_argument("need at least two values of N");
    const double qp = q0 / (q0 - 1.0);
    ScalingReport rep;
    rep.experiment = "fl_norm";
    rep.seed = seed;
    std::vector<double> ns, vals;
    for (int n : n_list) {
        const auto eps = rademacher_signs(n, seed, 0xf1);
        const double v = flp_norm(family_sum(bumps, n, eps), qp);
        rep.rows.push_back({static_cast<double>(n), v, 0.0});
        ns.push_back(n);
        vals.push_back(v);
    }
    const LinearFit fit = loglog_fit(ns, vals);
    rep.slope = fit.slope;
    rep.slope_ci = 1.96 * fit.slope_stderr;
    return rep;
}

std::string classify_exponents(double lower, double upper, double margin)
{
    if (lower - upper > margin) return "unbounded";
    if (upper - lower > margin) return "no contradiction";
    return "inconclusive";
}

Verdict contradiction_summary(const ScalingReport& expectation, const ScalingReport& fl_norm, double r0, double q0)
{
    if (expectation.rows.size() != fl_norm.rows.size())
        throw std::invalid_argument("reports cover different N lists");
    for (std::size_t i = 0; i < expectation.rows.size(); ++i)
        if (expectation.rows[i].parameter != fl_norm.rows[i].parameter)
            throw std::invalid_argument("reports cover different N lists");
    if (!(q0 >= 1.0)) throw std::domain_error("q0 must be at least 1");

    Verdict v;
    v.lower = expectation.slope;
    v.upper = fl_norm.slope * r0;
    v.target_lower = r0 / 2.0;
    v.target_upper = (1.0 - 1.0 / q0) * r0;
    const double joint = std::hypot(expectation.slope_ci, r0 * fl_norm.slope_ci);
    v.margin = std::max(joint, kExponentTolerance);
    v.verdict = classify_exponents(v.lower, v.upper, v.margin);
    v.predicted = classify_exponents(v.target_lower, v.target_upper, kExponentTolerance);
    return v;
}

}  // namespace bhtlab
