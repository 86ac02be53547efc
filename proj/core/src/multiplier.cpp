#include "bhtlab/multiplier.hpp"

#include "bhtlab/fft.hpp"
#include "bhtlab/parallel.hpp"
#include "bhtlab/summation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace bhtlab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx turn(double turns) { return std::polar(1.0, kTwoPi * std::remainder(turns, 1.0)); }

void require_same_grid(const SampledFunction& a, const SampledFunction& b)
{
    if (!(a.grid() == b.grid())) throw std::invalid_argument("inputs live on different grids");
}

std::vector<std::size_t> active_slots(const Spectrum& s, double rel_tol)
{
    double peak = 0.0;
    for (const cplx& c : s.coeffs()) peak = std::max(peak, std::abs(c));
    std::vector<std::size_t> out;
    if (peak == 0.0) return out;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (std::abs(s[i]) > rel_tol * peak) out.push_back(i);
    return out;
}

std::size_t fft_slot(const Grid& g, std::size_t i)
{
    const long n = static_cast<long>(g.size());
    return static_cast<std::size_t>((g.index_of_slot(i) + n) % n);
}

}  // namespace

Symbol sign_symbol()
{
    return {[](double a, double b) -> cplx { return a > b ? 1.0 : (a < b ? -1.0 : 0.0); }, 0.0, SymbolKind::sign};
}

Symbol exp_decay_symbol(double delta)
{
    if (!(delta >= 0.0)) throw std::domain_error("exp-decay symbol needs delta >= 0");
    return {[delta](double a, double b) -> cplx {
                double d = distance_to_diagonal(a, b);
                if (d == 0.0) return 0.0;
                return std::exp(-delta * std::hypot(a, b) / d);
            },
            delta, SymbolKind::exp_decay};
}

Symbol constant_symbol(cplx value)
{
    return {[value](double, double) { return value; }, 0.0, SymbolKind::custom};
}

Symbol scaled(const Symbol& m, cplx factor)
{
    auto inner = m.eval;
    return {[inner, factor](double a, double b) { return factor * inner(a, b); }, m.delta, SymbolKind::custom};
}

double top_band_energy_fraction(const Spectrum& s)
{
    const double cut = 0.9 * s.grid().nyquist();
    CompensatedSum<double> total, top;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double e = std::norm(s[i]);
        total.add(e);
        if (std::abs(s.grid().frequency(i)) > cut) top.add(e);
    }
    return total.value() == 0.0 ? 0.0 : top.value() / total.value();
}

double max_active_frequency(const Spectrum& s, double rel_tol)
{
    double out = 0.0;
    for (std::size_t i : active_slots(s, rel_tol)) out = std::max(out, std::abs(s.grid().frequency(i)));
    return out;
}

MultiplierResult apply_bilinear_multiplier(const Symbol& m, const SampledFunction& f1, const SampledFunction& f2)
{
    require_same_grid(f1, f2);
    const Grid& g = f1.grid();
    const std::size_t n = g.size();
    const Spectrum s1 = forward_transform(f1);
    const Spectrum s2 = forward_transform(f2);
    const bool warn = top_band_energy_fraction(s1) > 1e-10 || top_band_energy_fraction(s2) > 1e-10;

    const auto act1 = active_slots(s1, 1e-15);
    const auto act2 = active_slots(s2, 1e-15);
    const double inv_l = 1.0 / g.period();

    // f2 coefficients pre-rotated by the grid offset so the FFT lands on x_j directly.
    std::vector<cplx> base2(act2.size());
    std::vector<std::size_t> pos2(act2.size());
    for (std::size_t a = 0; a < act2.size(); ++a) {
        std::size_t i = act2[a];
        base2[a] = s2[i] * inv_l * turn(static_cast<double>(g.index_of_slot(i)) * g.left() / g.period());
        pos2[a] = fft_slot(g, i);
    }

    // Fixed chunking of the active xi1 list keeps the reduction order independent of threads.
    const std::size_t chunks = std::min<std::size_t>(act1.size(), 16);
    std::vector<std::vector<cplx>> partial(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<cplx> acc(n);
        std::vector<cplx> work(n);
        const std::size_t lo = c * act1.size() / chunks;
        const std::size_t hi = (c + 1) * act1.size() / chunks;
        for (std::size_t a = lo; a < hi; ++a) {
            const std::size_t i1 = act1[a];
            const double xi1 = g.frequency(i1);
            std::fill(work.begin(), work.end(), cplx{});
            for (std::size_t b = 0; b < act2.size(); ++b) {
                cplx mv = m(xi1, g.frequency(act2[b]));
                if (mv != cplx{}) work[pos2[b]] = mv * base2[b];
            }
            fft::backward(work);
            // (1/L) c1 e^{2 pi i x_j xi1}, with x_j xi1 = m1 x0 / L + m1 j / M.
            const long m1 = g.index_of_slot(i1);
            const cplx lead = s1[i1] * inv_l * turn(static_cast<double>(m1) * g.left() / g.period());
            const long nn = static_cast<long>(n);
            for (std::size_t j = 0; j < n; ++j) {
                long r = (m1 * static_cast<long>(j)) % nn;
                acc[j] += lead * turn(static_cast<double>(r) / static_cast<double>(n)) * work[j];
            }
        }
        partial[c] = std::move(acc);
    });

    std::vector<cplx> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        CompensatedSum<cplx> sum;
        for (const auto& p : partial) sum.add(p[j]);
        out[j] = sum.value();
    }
    return {SampledFunction(g, std::move(out)), warn};
}

void PvQuadratureConfig::validate() const
{
    if (!(eta > 0.0) || !(tmax > eta)) throw std::invalid_argument("quadrature needs 0 < eta < tmax");
    if (eta > kMaxPvEta) throw std::invalid_argument("eta above 1e-4 truncates too much of the principal value");
    if (nodes_per_decade < 16) throw std::invalid_argument("quadrature needs at least 16 nodes per decade");
    if (gauss_points < 2 || gauss_points > 16) throw std::invalid_argument("gauss_points must lie in [2, 16]");
}

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

GaussRule gauss_legendre(int n)
{
    GaussRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

struct QuadNode {
    double t;
    double weight;  // includes the 1/t factor
};

std::vector<QuadNode> pv_nodes(const PvQuadratureConfig& cfg, double max_frequency)
{
    const GaussRule rule = gauss_legendre(cfg.gauss_points);
    // Integrand oscillates at most like e^{2 pi i t * 2 max_frequency}; half a period per panel.
    const double width_cap = max_frequency > 0.0 ? 1.0 / (4.0 * max_frequency) : cfg.tmax;
    std::vector<double> breaks{cfg.eta};
    const double ratio = std::pow(10.0, 1.0 / cfg.nodes_per_decade);
    while (breaks.back() < cfg.tmax) breaks.push_back(std::min(cfg.tmax, breaks.back() * ratio));
    std::vector<QuadNode> out;
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double a = breaks[b], c = breaks[b + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil((c - a) / width_cap)));
        for (int p = 0; p < pieces; ++p) {
            const double lo = a + (c - a) * p / pieces;
            const double hi = a + (c - a) * (p + 1) / pieces;
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
                const double t = mid + half * rule.nodes[q];
                out.push_back({t, half * rule.weights[q] / t});
            }
        }
    }
    return out;
}

}  // namespace

std::vector<cplx> bht_timedomain(const SampledFunction& f1, const SampledFunction& f2,
                                 const PvQuadratureConfig& cfg, std::span<const double> points)
{
    cfg.validate();
    require_same_grid(f1, f2);
    const Grid& g = f1.grid();
    const std::size_t n = g.size();
    const Spectrum s1 = forward_transform(f1);
    const Spectrum s2 = forward_transform(f2);
    const double fmax = std::max(max_active_frequency(s1), max_active_frequency(s2));
    if (cfg.eta * fmax > 0.1)
        throw std::domain_error("eta too large for the input bandwidth: eta * max frequency = " +
                                std::to_string(cfg.eta * fmax) + " > 0.1");

    // Group evaluation points by their offset from the grid so each group is served by FFTs.
    struct Group {
        double offset;
        std::vector<std::pair<std::size_t, std::size_t>> members;  // (point index, grid index)
    };
    std::vector<Group> groups;
    const double h = g.spacing();
    for (std::size_t p = 0; p < points.size(); ++p) {
        const double u = (points[p] - g.left()) / h;
        if (!(u >= -0.5 && u < static_cast<double>(n) - 0.5))
            throw std::invalid_argument("evaluation point outside the grid period");
        const double j = std::round(u);
        double offset = (u - j) * h;
        if (std::abs(u - j) < 1e-9) offset = 0.0;
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& gr) { return gr.offset == offset; });
        if (it == groups.end()) {
            groups.push_back({offset, {}});
            it = std::prev(groups.end());
        }
        it->members.emplace_back(p, static_cast<std::size_t>(j));
    }

    const auto nodes = pv_nodes(cfg, fmax);
    const auto act1 = active_slots(s1, 1e-15);
    const auto act2 = active_slots(s2, 1e-15);
    auto prepare = [&](const Spectrum& s, const std::vector<std::size_t>& act) {
        std::vector<cplx> base(act.size());
        for (std::size_t a = 0; a < act.size(); ++a) {
            const std::size_t i = act[a];
            base[a] = s[i] / g.period() * turn(static_cast<double>(g.index_of_slot(i)) * g.left() / g.period());
        }
        return base;
    };
    const auto base1 = prepare(s1, act1);
    const auto base2 = prepare(s2, act2);

    // Samples of f(x_j - tau) via the interpolant.
    auto shifted = [&](const std::vector<std::size_t>& act, const std::vector<cplx>& base, double tau,
                       std::vector<cplx>& work) {
        std::fill(work.begin(), work.end(), cplx{});
        for (std::size_t a = 0; a < act.size(); ++a)
            work[fft_slot(g, act[a])] = base[a] * turn(-g.frequency(act[a]) * tau);
        fft::backward(work);
    };

    std::vector<cplx> result(points.size());
    for (const Group& group : groups) {
        // Deterministic node chunks, reduced in order.
        const std::size_t chunks = std::min<std::size_t>(nodes.size(), 16);
        std::vector<std::vector<cplx>> partial(chunks);
        parallel_for(chunks, [&](std::size_t c) {
            std::vector<CompensatedSum<cplx>> acc(group.members.size());
            std::vector<cplx> a(n), b(n), cc(n), d(n);
            const std::size_t lo = c * nodes.size() / chunks, hi = (c + 1) * nodes.size() / chunks;
            for (std::size_t k = lo; k < hi; ++k) {
                const double t = nodes[k].t;
                // x = x_j + offset: f1(x - t) is f1 shifted by (t - offset), and so on.
                shifted(act1, base1, t - group.offset, a);
                shifted(act2, base2, -t - group.offset, b);
                shifted(act1, base1, -t - group.offset, cc);
                shifted(act2, base2, t - group.offset, d);
                for (std::size_t q = 0; q < group.members.size(); ++q) {
                    const std::size_t j = group.members[q].second % n;
                    acc[q].add(nodes[k].weight * (a[j] * b[j] - cc[j] * d[j]));
                }
            }
            std::vector<cplx> out(group.members.size());
            for (std::size_t q = 0; q < out.size(); ++q) out[q] = acc[q].value();
            partial[c] = std::move(out);
        });
        for (std::size_t q = 0; q < group.members.size(); ++q) {
            CompensatedSum<cplx> sum;
            for (const auto& p : partial) sum.add(p[q]);
            result[group.members[q].first] = sum.value();
        }
    }
    return result;
}

namespace {

double fd_derivative(const Symbol& m, double x, double y, int a1, int a2, double s)
{
    auto v = [&](double dx, double dy) { return m(x + dx * s, y + dy * s); };
    cplx r;
    if (a1 == 0 && a2 == 0) r = v(0, 0);
    else if (a1 == 1 && a2 == 0) r = (v(1, 0) - v(-1, 0)) / (2.0 * s);
    else if (a1 == 0 && a2 == 1) r = (v(0, 1) - v(0, -1)) / (2.0 * s);
    else if (a1 == 2 && a2 == 0) r = (v(1, 0) - 2.0 * v(0, 0) + v(-1, 0)) / (s * s);
    else if (a1 == 0 && a2 == 2) r = (v(0, 1) - 2.0 * v(0, 0) + v(0, -1)) / (s * s);
    else r = (v(1, 1) - v(1, -1) - v(-1, 1) + v(-1, -1)) / (4.0 * s * s);
    return std::abs(r);
}

SymbolCheckReport check(const Symbol& m, std::span<const std::pair<double, double>> points, int max_order)
{
    if (max_order < 0 || max_order > 2) throw std::invalid_argument("max_order must lie in [0, 2]");
    SymbolCheckReport rep;
    for (auto [x, y] : points) {
        const double d = distance_to_diagonal(x, y);
        const double r = std::hypot(x, y);
        if (d <= 1e-12 * std::max(r, 1e-300)) {
            rep.skipped.emplace_back(x, y);
            continue;
        }
        const double s = 1e-4 * d;
        for (int order = 0; order <= max_order; ++order) {
            for (int a1 = order; a1 >= 0; --a1) {
                const int a2 = order - a1;
                SymbolCheckRow row{x, y, a1, a2, 0.0, 0.0, 0.0};
                row.derivative = fd_derivative(m, x, y, a1, a2, s);
                row.envelope = std::pow(d, -order) * std::exp(-m.delta * (1.0 - order / 3.0) * r / d);
                row.ratio = row.envelope > 0.0 ? row.derivative / row.envelope
                                               : (row.derivative == 0.0 ? 0.0 : HUGE_VAL);
                rep.max_ratio = std::max(rep.max_ratio, row.ratio);
                rep.rows.push_back(row);
            }
        }
    }
    return rep;
}

}  // namespace

SymbolCheckReport verify_symbol_class(const Symbol& m, std::span<const std::pair<double, double>> points,
                                      int max_order, double constant)
{
    SymbolCheckReport rep = check(m, points, max_order);
    rep.constant = constant;
    rep.pass = rep.max_ratio <= constant;
    return rep;
}

double fit_symbol_constant(const Symbol& m, std::span<const std::pair<double, double>> points, int max_order)
{
    return check(m, points, max_order).max_ratio;
}

Grid oracle_grid() { return Grid(4096, 128.0, -64.0); }

SampledFunction random_gaussian_tones(const Grid& grid, RandomStream& rs)
{
    std::array<double, 3> nu{}, center{};
    std::array<cplx, 3> amp{};
    for (int k = 0; k < 3; ++k) {
        nu[k] = rs.uniform(-3.0, 3.0);
        center[k] = rs.uniform(-1.0, 1.0);
        amp[k] = rs.complex_normal();
    }
    return SampledFunction::from(grid, [&](double x) {
        cplx s;
        for (int k = 0; k < 3; ++k) {
            const double u = x - center[k];
            s += amp[k] * turn(nu[k] * x) * std::exp(-std::numbers::pi * u * u);
        }
        return s;
    });
}

std::vector<OracleCase> oracle_suite(int cases, std::uint64_t seed, const PvQuadratureConfig& cfg)
{
    if (cases < 1) throw std::invalid_argument("oracle suite needs at least one case");
    cfg.validate();
    const Grid g = oracle_grid();
    std::vector<double> points;
    std::vector<std::size_t> index;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (std::abs(g.x(j)) <= kOracleWindow) {
            points.push_back(g.x(j));
            index.push_back(j);
        }
    }
    std::vector<OracleCase> out(static_cast<std::size_t>(cases));
    parallel_for(out.size(), [&](std::size_t c) {
        RandomStream rs(seed, c);
        const auto f1 = random_gaussian_tones(g, rs);
        const auto f2 = random_gaussian_tones(g, rs);
        const auto spectral = apply_bilinear_multiplier(sign_symbol(), f1, f2);
        const auto direct = bht_timedomain(f1, f2, cfg, points);
        CompensatedSum<double> num, den;
        for (std::size_t q = 0; q < points.size(); ++q) {
            const cplx s = kPvToSpectral * spectral.value[index[q]];
            num.add(std::norm(direct[q] - s));
            den.add(std::norm(s));
        }
        out[c] = {static_cast<int>(c) + 1, std::sqrt(num.value() / den.value())};
    });
    return out;
}

}  // namespace bhtlab
