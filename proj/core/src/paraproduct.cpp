#include "bhtlab/paraproduct.hpp"

#include "bhtlab/parallel.hpp"
#include "bhtlab/random.hpp"
#include "bhtlab/stats.hpp"
#include "bhtlab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bhtlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_slot(int slot)
{
    if (slot < 1 || slot > 3) throw std::invalid_argument("packet slot must be 1, 2 or 3");
}

std::vector<double> maximal_values(const PacketBank& bank, std::span<const cplx> a)
{
    std::vector<double> out(bank.grid().size(), 0.0);
    for (std::size_t p = 0; p < bank.size(); ++p) {
        const double v = std::abs(a[p]) / std::sqrt(bank.collection().tiles[p].time_length());
        const auto [lo, hi] = bank.time_span(p);
        for (std::size_t j = lo; j < hi; ++j) out[j] = std::max(out[j], v);
    }
    return out;
}

std::vector<double> square_values(const PacketBank& bank, std::span<const cplx> a)
{
    std::vector<double> out(bank.grid().size(), 0.0);
    for (std::size_t p = 0; p < bank.size(); ++p) {
        const double v = std::norm(a[p]) / bank.collection().tiles[p].time_length();
        const auto [lo, hi] = bank.time_span(p);
        for (std::size_t j = lo; j < hi; ++j) out[j] += v;
    }
    for (double& v : out) v = std::sqrt(v);
    return out;
}

SampledFunction as_function(const Grid& grid, const std::vector<double>& v)
{
    std::vector<cplx> c(v.begin(), v.end());
    return {grid, std::move(c)};
}

std::size_t power_of_two_above(double x)
{
    std::size_t m = 8;
    while (static_cast<double>(m) <= x) m *= 2;
    return m;
}

}  // namespace

double TriTile::time_length() const { return std::ldexp(1.0, -l); }
double TriTile::time_lo() const { return std::ldexp(static_cast<double>(m), -l); }
double TriTile::time_hi() const { return std::ldexp(static_cast<double>(m + 1), -l); }

std::array<Interval, 3> tile_frequencies(const FrequencyCube& cube)
{
    const double len = cube.q1.length();
    const double c3 = -(cube.q1.center() + cube.q2.center());
    return {Interval{cube.q1.lo(), cube.q1.hi()}, Interval{cube.q2.lo(), cube.q2.hi()},
            Interval{c3 - 0.5 * len, c3 + 0.5 * len}};
}

TileCollection build_tiles(std::span<const FrequencyCube> family, Window window)
{
    if (!std::isfinite(window.lo) || !std::isfinite(window.hi) || !(window.lo < window.hi)) {
        throw std::invalid_argument("time window must be a bounded nonempty interval");
    }
    TileCollection coll;
    coll.window = window;
    coll.cubes.assign(family.begin(), family.end());
    for (std::size_t c = 0; c < coll.cubes.size(); ++c) {
        const auto& cube = coll.cubes[c];
        if (cube.q1.scale != cube.q2.scale) throw std::invalid_argument("cube sides differ");
        const int l = -cube.q1.scale;
        const auto first = static_cast<std::int64_t>(std::ceil(std::ldexp(window.lo, l)));
        const auto last = static_cast<std::int64_t>(std::floor(std::ldexp(window.hi, l))) - 1;
        const auto omega = tile_frequencies(cube);
        for (std::int64_t m = first; m <= last; ++m) coll.tiles.push_back({l, m, omega, c});
    }
    return coll;
}

double default_packet_profile(double u)
{
    if (!(std::abs(u) < 1.0)) return 0.0;
    return std::exp(-2.0 / (1.0 - u * u));
}

WavePacket::WavePacket(Grid grid, Interval time, Interval omega, std::size_t first_slot, std::vector<cplx> coeffs)
    : grid_(grid), time_(time), omega_(omega), first_(first_slot), coeffs_(std::move(coeffs))
{
    if (first_ + coeffs_.size() > grid_.size()) throw std::invalid_argument("packet spectrum runs past the grid");
}

Spectrum WavePacket::spectrum() const
{
    std::vector<cplx> c(grid_.size());
    std::copy(coeffs_.begin(), coeffs_.end(), c.begin() + static_cast<std::ptrdiff_t>(first_));
    return {grid_, std::move(c)};
}

SampledFunction WavePacket::samples() const { return inverse_transform(spectrum()); }

WavePacket make_wave_packet(const Grid& grid, Interval time, Interval omega, const BumpProfile& profile)
{
    const double len = grid.period();
    const double center = 0.5 * (omega.lo + omega.hi);
    const double half = 0.45 * omega.length();
    const double edge = std::max(std::abs(center - half), std::abs(center + half));
    if (!grid.resolves(edge)) {
        const std::size_t need = power_of_two_above(2.0 * edge * len);
        std::ostringstream os;
        os << "grid of " << grid.size() << " samples cannot resolve frequency " << edge << "; needs " << need;
        throw BandwidthError(os.str(), need);
    }
    const auto mlo = static_cast<long>(std::ceil((center - half) * len));
    const auto mhi = static_cast<long>(std::floor((center + half) * len));
    const double xc = 0.5 * (time.lo + time.hi);
    std::vector<cplx> c;
    long first = mlo;
    for (long m = mlo; m <= mhi; ++m) {
        const double v = profile((static_cast<double>(m) / len - center) / half);
        if (c.empty() && v == 0.0) {
            first = m + 1;
            continue;
        }
        // xi_m * x_c reduced mod 1 before forming the phase.
        const double cycles = std::remainder(static_cast<double>(m) * xc / len, 1.0);
        c.push_back(std::polar(v, -kTwoPi * cycles));
    }
    while (!c.empty() && c.back() == cplx{}) c.pop_back();
    if (c.empty()) throw std::invalid_argument("frequency interval is narrower than the grid's frequency step");
    double energy = 0.0;
    for (const auto& v : c) energy += std::norm(v);
    const double scale = std::sqrt(len / energy);
    for (auto& v : c) v *= scale;
    return {grid, time, omega, *grid.slot_of_index(first), std::move(c)};
}

cplx packet_pairing(const Spectrum& f, const WavePacket& phi)
{
    if (!(f.grid() == phi.grid())) throw std::invalid_argument("pairing needs a shared grid");
    CompensatedSum<cplx> acc;
    const auto c = phi.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) acc.add(f[phi.first_slot() + i] * std::conj(c[i]));
    return acc.value() / f.grid().period();
}

void add_reflected(std::vector<cplx>& spectrum, const Grid& grid, const WavePacket& phi, cplx weight)
{
    const auto run = phi.coeffs();
    for (std::size_t i = 0; i < run.size(); ++i) {
        if (const auto mirror = grid.slot_of_index(-grid.index_of_slot(phi.first_slot() + i))) {
            spectrum[*mirror] += weight * std::conj(run[i]);
        }
    }
}

std::size_t required_model_samples(const TileCollection& coll, double period)
{
    double edge = 0.0;
    for (const auto& t : coll.tiles) {
        for (const auto& w : t.omega) edge = std::max({edge, std::abs(w.lo), std::abs(w.hi)});
    }
    return power_of_two_above(2.0 * edge * period);
}

PacketBank::PacketBank(TileCollection coll, Grid grid, const BumpProfile& profile)
    : coll_(std::move(coll)), grid_(grid)
{
    const double x0 = grid_.left(), h = grid_.spacing();
    packets_.reserve(3 * coll_.tiles.size());
    for (const auto& t : coll_.tiles) {
        const Interval time{t.time_lo(), t.time_hi()};
        if (time.lo < x0 || time.hi > x0 + grid_.period()) throw std::invalid_argument("tile lies outside the grid period");
        const double jlo = (time.lo - x0) / h, jhi = (time.hi - x0) / h;
        if (std::abs(jlo - std::round(jlo)) > 1e-9 || std::abs(jhi - std::round(jhi)) > 1e-9) {
            throw std::invalid_argument("tile boundaries must fall on grid points");
        }
        spans_.emplace_back(static_cast<std::size_t>(std::llround(jlo)), static_cast<std::size_t>(std::llround(jhi)));
        for (const auto& w : t.omega) packets_.push_back(make_wave_packet(grid_, time, w, profile));
    }
}

const WavePacket& PacketBank::packet(std::size_t tile, int slot) const
{
    require_slot(slot);
    return packets_.at(3 * tile + static_cast<std::size_t>(slot - 1));
}

std::vector<cplx> PacketBank::pairings(const SampledFunction& f, int slot) const
{
    require_slot(slot);
    if (!(f.grid() == grid_)) throw std::invalid_argument("function and packet bank use different grids");
    const Spectrum s = forward_transform(f);
    std::vector<cplx> out(size());
    for (std::size_t p = 0; p < size(); ++p) out[p] = packet_pairing(s, packet(p, slot));
    return out;
}

std::pair<std::size_t, std::size_t> PacketBank::time_span(std::size_t tile) const { return spans_.at(tile); }

SampledFunction model_apply(const PacketBank& bank, const SampledFunction& f1, const SampledFunction& f2,
                            std::span<const cplx> coeffs)
{
    if (!coeffs.empty() && coeffs.size() != bank.size()) throw std::invalid_argument("one coefficient per tile");
    const auto a1 = bank.pairings(f1, 1);
    const auto a2 = bank.pairings(f2, 2);
    std::vector<cplx> spec(bank.grid().size());
    for (std::size_t p = 0; p < bank.size(); ++p) {
        const cplx c = coeffs.empty() ? cplx{1.0} : coeffs[p];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw std::invalid_argument("non-finite tile coefficient");
        const cplx w = c * a1[p] * a2[p] / std::sqrt(bank.collection().tiles[p].time_length());
        add_reflected(spec, bank.grid(), bank.packet(p, 3), w);
    }
    return inverse_transform(Spectrum(bank.grid(), std::move(spec)));
}

SampledFunction maximal_op(const PacketBank& bank, const SampledFunction& f, int slot)
{
    return as_function(bank.grid(), maximal_values(bank, bank.pairings(f, slot)));
}

SampledFunction square_op(const PacketBank& bank, const SampledFunction& f, int slot)
{
    return as_function(bank.grid(), square_values(bank, bank.pairings(f, slot)));
}

cplx trilinear_form(const PacketBank& bank, std::span<const cplx> coeffs, const SampledFunction& f1,
                    const SampledFunction& f2, const SampledFunction& f3)
{
    if (!coeffs.empty() && coeffs.size() != bank.size()) throw std::invalid_argument("one coefficient per tile");
    const auto a1 = bank.pairings(f1, 1);
    const auto a2 = bank.pairings(f2, 2);
    const auto a3 = bank.pairings(f3, 3);
    CompensatedSum<cplx> acc;
    for (std::size_t p = 0; p < bank.size(); ++p) {
        const cplx c = coeffs.empty() ? cplx{1.0} : coeffs[p];
        acc.add(c * a1[p] * a2[p] * a3[p] / std::sqrt(bank.collection().tiles[p].time_length()));
    }
    return acc.value();
}

DominationResult domination_check(const PacketBank& bank, const SampledFunction& f1, const SampledFunction& f2,
                                  const SampledFunction& f3, bool swap_roles)
{
    const auto a1 = bank.pairings(f1, 1);
    const auto a2 = bank.pairings(f2, 2);
    const auto a3 = bank.pairings(f3, 3);
    DominationResult r;
    CompensatedSum<cplx> lambda;
    CompensatedSum<double> lhs;
    for (std::size_t p = 0; p < bank.size(); ++p) {
        const double root = std::sqrt(bank.collection().tiles[p].time_length());
        lambda.add(a1[p] * a2[p] * a3[p] / root);
        lhs.add(std::abs(a1[p]) * std::abs(a2[p]) * std::abs(a3[p]) / root);
    }
    r.lambda = std::abs(lambda.value());
    r.lhs = lhs.value();
    const auto u = swap_roles ? square_values(bank, a1) : maximal_values(bank, a1);
    const auto v = square_values(bank, a2);
    const auto w = swap_roles ? maximal_values(bank, a3) : square_values(bank, a3);
    CompensatedSum<double> rhs;
    for (std::size_t j = 0; j < u.size(); ++j) rhs.add(u[j] * v[j] * w[j]);
    r.rhs = rhs.value() * bank.grid().spacing();
    r.pass = r.lhs <= r.rhs * (1.0 + 1e-8);
    return r;
}

std::vector<SlotPattern> model_slots(int n)
{
    const double k = kModelConstantScale * whitney_constant(n);
    const double dlo = std::numbers::sqrt2 / (kProportionalitySlack * k);
    const double dhi = std::numbers::sqrt2 / (0.5 * kProportionalitySlack * k);
    const WhitneyCover cover(n, {0.999 * dlo, 1.001 * dhi}, kModelConstantScale);
    std::vector<std::tuple<double, double, SlotPattern>> keyed;
    // Square centers may sit past the upper edge of a narrow cone, so widen the window.
    const AngularWindow cone = cover.cone_window();
    for (const auto& q : cover.enumerate({cone.lo, std::min(cone.hi + 0.3, 0.95 * std::numbers::pi)})) {
        if (q.q1.scale != 0) continue;
        const double r = proportionality(q, kModelConstantScale);
        if (r < 0.5 * kProportionalitySlack || r > kProportionalitySlack) continue;
        keyed.emplace_back(std::atan2(q.center2(), q.center1()), std::hypot(q.center1(), q.center2()), pattern_of(q));
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<SlotPattern> out;
    for (const auto& k2 : keyed) out.push_back(std::get<2>(k2));
    return out;
}

std::vector<FrequencyCube> model_family(int n, std::int64_t k, const ModelFamilyOptions& opt)
{
    const auto slots = model_slots(n);
    if (k < 1 || k > static_cast<std::int64_t>(slots.size())) {
        throw std::out_of_range("model slot " + std::to_string(k) + " outside [1, " + std::to_string(slots.size()) + "]");
    }
    if (opt.lmin > opt.lmax) throw std::invalid_argument("model family needs lmin <= lmax");
    std::vector<FrequencyCube> out;
    for (int l = opt.lmin; l <= opt.lmax; ++l) {
        WhitneySquare q = square_at(slots[static_cast<std::size_t>(k - 1)], -l, n);
        q.slot = k;
        out.push_back(complete_to_cube(q));
    }
    return out;
}

SampledFunction random_packet_sum(const PacketBank& bank, int slot, double p, std::uint64_t seed, std::uint64_t index)
{
    require_slot(slot);
    RandomStream rs(seed, index, 0x5a00 + static_cast<std::uint64_t>(slot));
    std::vector<cplx> spec(bank.grid().size());
    for (std::size_t t = 0; t < bank.size(); ++t) {
        const cplx g = rs.complex_normal();
        const auto& phi = bank.packet(t, slot);
        const auto run = phi.coeffs();
        for (std::size_t i = 0; i < run.size(); ++i) spec[phi.first_slot() + i] += g * run[i];
    }
    SampledFunction f = inverse_transform(Spectrum(bank.grid(), std::move(spec)));
    const double norm = lp_quasinorm(f, p);
    if (!(norm > 0.0)) throw std::invalid_argument("random packet sum vanished; the collection is empty");
    for (auto& v : f.mutable_values()) v /= norm;
    return f;
}

double holder_target(double p1, double p2)
{
    if (!(p1 >= 1.0) || !(p2 >= 1.0) || !std::isfinite(p1) || !std::isfinite(p2)) {
        throw std::domain_error("p1 and p2 must be finite and at least 1");
    }
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    if (!(p > 0.5)) throw std::domain_error("target exponent p must lie in (1/2, infinity)");
    return p;
}

HolderReport empirical_holder_bound(const HolderOptions& opt)
{
    HolderReport rep;
    rep.p = holder_target(opt.p1, opt.p2);
    if (opt.ensemble < 1) throw std::invalid_argument("ensemble must hold at least one sample");
    if (opt.n_list.empty() || opt.windows.empty()) throw std::invalid_argument("n list and windows must be nonempty");

    std::uint64_t family_index = 0;
    for (int n : opt.n_list) {
        const auto slots = model_slots(n);
        if (slots.empty()) throw std::runtime_error("cone " + std::to_string(n) + " has no model slots");
        std::vector<std::int64_t> ks = opt.slots;
        if (ks.empty()) {
            ks = {1, static_cast<std::int64_t>((slots.size() + 1) / 2), static_cast<std::int64_t>(slots.size())};
        }
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        for (auto k : ks) {
            const auto family = model_family(n, k, opt.family);
            for (std::size_t w = 0; w < opt.windows.size(); ++w) {
                const double t = opt.windows[w];
                TileCollection coll = build_tiles(family, {-t, t});
                HolderRow row{n, k, t, coll.tiles.size(), 0.0};
                if (!coll.tiles.empty()) {
                    const Grid grid(required_model_samples(coll, kModelPeriod), kModelPeriod, -0.5 * kModelPeriod);
                    const PacketBank bank(std::move(coll), grid);
                    std::vector<double> ratios(static_cast<std::size_t>(opt.ensemble));
                    const std::uint64_t base = (family_index * 64 + w) * 1000000;
                    parallel_for(ratios.size(), [&](std::size_t e) {
                        const auto f1 = random_packet_sum(bank, 1, opt.p1, opt.seed, base + 2 * e);
                        const auto f2 = random_packet_sum(bank, 2, opt.p2, opt.seed, base + 2 * e + 1);
                        ratios[e] = lp_quasinorm(model_apply(bank, f1, f2), rep.p);
                    });
                    row.ratio = *std::max_element(ratios.begin(), ratios.end());
                }
                rep.rows.push_back(row);
            }
            ++family_index;
        }
    }

    // Pooled log-log fits over every (n, k, window) row.
    std::vector<double> xn, xs, ys;
    std::map<int, double> by_n;
    for (const auto& r : rep.rows) {
        by_n[r.n] = std::max(by_n[r.n], r.ratio);
        if (r.ratio > 0.0 && r.tiles > 0) {
            xn.push_back(r.n);
            xs.push_back(static_cast<double>(r.tiles));
            ys.push_back(r.ratio);
        }
    }
    for (const auto& [n, v] : by_n) rep.scaling.rows.push_back({static_cast<double>(n), v, 0.0});
    const auto distinct = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return std::unique(v.begin(), v.end()) - v.begin();
    };
    const bool fitted = distinct(xs) >= 2;
    if (distinct(xn) >= 2) {
        const auto fit = loglog_fit(xn, ys);
        rep.slope_vs_n = fit.slope;
        rep.scaling.slope = fit.slope;
        rep.scaling.slope_ci = 1.96 * fit.slope_stderr;
    }
    if (fitted) rep.slope_vs_size = loglog_fit(xs, ys).slope;
    rep.scaling.experiment = "holder_bound";
    rep.scaling.seed = opt.seed;
    rep.pass = fitted && std::abs(rep.slope_vs_n) <= opt.slope_tolerance &&
               std::abs(rep.slope_vs_size) <= opt.slope_tolerance;
    return rep;
}

}  // namespace bhtlab
