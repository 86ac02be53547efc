#include "bhtlab/coefficients.hpp"

#include "bhtlab/parallel.hpp"
#include "bhtlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bhtlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double smooth_step(double u)
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// Cell center of an axis as the exact fraction num / 6.
std::int64_t center_numerator(const ShiftedDyadicInterval& q) { return 6 * q.index + 2 * q.shift + 3; }

// e^{-2 pi i k c / period} for the cell center c = num / 6, reduced exactly before the
// floating-point phase is formed.
cplx center_phase(std::int64_t num, int k, int period)
{
    const std::int64_t den = 6 * period;
    std::int64_t r = (static_cast<std::int64_t>(k) * (num % den)) % den;
    if (r < 0) r += den;
    return std::polar(1.0, -kTwoPi * static_cast<double>(r) / static_cast<double>(den));
}

// Offsets u_i = -1 + 2i/N from the cell center.
std::vector<double> cell_offsets(int nodes)
{
    std::vector<double> u(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) u[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / nodes;
    return u;
}

struct CellSamples {
    int nodes = 0;
    double weight = 0.0;  // 2 / N per axis
    std::vector<double> u;
    std::vector<cplx> planar;  // row i1, column i2
    std::vector<double> third;
};

CellSamples sample_cell(const LocalizedSymbol& mq, int nodes)
{
    if (nodes < 16 || nodes % 2 != 0) {
        throw std::invalid_argument("quadrature needs an even node count of at least 16, got " + std::to_string(nodes));
    }
    CellSamples s;
    s.nodes = nodes;
    s.weight = 2.0 / nodes;
    s.u = cell_offsets(nodes);
    const auto n = static_cast<std::size_t>(nodes);
    const auto& cube = mq.cube();
    const double l1 = cube.q1.length(), l2 = cube.q2.length(), l3 = cube.q3.length();
    const double c1 = cube.q1.center(), c2 = cube.q2.center(), c3 = cube.q3.center();
    s.planar.assign(n * n, cplx{});
    parallel_for(n, [&](std::size_t i1) {
        const double xi1 = c1 + l1 * s.u[i1];
        for (std::size_t i2 = 0; i2 < n; ++i2) s.planar[i1 * n + i2] = mq.planar(xi1, c2 + l2 * s.u[i2]);
    });
    s.third.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.third[i] = mq.third(c3 + l3 * s.u[i]);
    return s;
}

// w^2 sum A(u) e^{-2 pi i (k1 u1 + k2 u2) / period} for |k_j| <= radius, row-major in (k1, k2).
std::vector<cplx> planar_sums(const CellSamples& s, int radius, int period)
{
    const auto n = static_cast<std::size_t>(s.nodes);
    const auto width = static_cast<std::size_t>(2 * radius + 1);
    std::vector<cplx> phase(width * n);
    for (std::size_t k = 0; k < width; ++k) {
        const double kk = static_cast<double>(k) - radius;
        for (std::size_t i = 0; i < n; ++i) phase[k * n + i] = std::polar(1.0, -kTwoPi * kk * s.u[i] / period);
    }
    // Inner sum over the second axis, then the first.
    std::vector<cplx> inner(n * width);
    parallel_for(n, [&](std::size_t i1) {
        for (std::size_t k2 = 0; k2 < width; ++k2) {
            cplx acc{};
            for (std::size_t i2 = 0; i2 < n; ++i2) acc += s.planar[i1 * n + i2] * phase[k2 * n + i2];
            inner[i1 * width + k2] = acc;
        }
    });
    std::vector<cplx> out(width * width);
    const double w2 = s.weight * s.weight;
    for (std::size_t k1 = 0; k1 < width; ++k1) {
        for (std::size_t k2 = 0; k2 < width; ++k2) {
            cplx acc{};
            for (std::size_t i1 = 0; i1 < n; ++i1) acc += phase[k1 * n + i1] * inner[i1 * width + k2];
            out[k1 * width + k2] = w2 * acc;
        }
    }
    return out;
}

std::vector<cplx> third_sums(const CellSamples& s, int radius, int period)
{
    const auto n = static_cast<std::size_t>(s.nodes);
    std::vector<cplx> out(static_cast<std::size_t>(2 * radius + 1));
    for (int k = -radius; k <= radius; ++k) {
        cplx acc{};
        for (std::size_t i = 0; i < n; ++i) acc += s.third[i] * std::polar(1.0, -kTwoPi * k * s.u[i] / period);
        out[static_cast<std::size_t>(k + radius)] = s.weight * acc;
    }
    return out;
}

void check_aliasing(const IndexBox& box, int nodes)
{
    const int limit = nodes / 8;
    if (box.r1 < 0 || box.r2 < 0 || box.r3 < 0) throw std::invalid_argument("index box radii must be nonnegative");
    if (box.r1 > limit || box.r2 > limit || box.r3 > limit) {
        std::ostringstream os;
        os << "aliasing risk: index radius " << std::max({box.r1, box.r2, box.r3}) << " exceeds nodes/8 = " << limit
           << " for " << nodes << " nodes";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

double third_slot_plateau(const ShiftedDyadicInterval& q3, double xi3)
{
    const double u = std::abs(xi3 - q3.center()) / q3.length();
    return smooth_step((0.6 - u) / 0.15);
}

LocalizedSymbol::LocalizedSymbol(Symbol m, FrequencyCube cube, const PartitionOfUnity& partition)
    : m_(std::move(m)), cube_(cube), overlap_(partition.overlapping(cube.source))
{
    WhitneySquare probe = cube_.source;
    probe.slot = 0;
    const bool member = std::any_of(overlap_.begin(), overlap_.end(), [&](const WhitneySquare& q) { return q == probe; });
    if (!member) throw std::invalid_argument("cube source square is not part of the partition's cover");
}

cplx LocalizedSymbol::planar(double xi1, double xi2) const
{
    const double phi = PartitionOfUnity::normalized(cube_.source, overlap_, xi1, xi2);
    if (phi == 0.0) return {};
    return m_(xi1, xi2) * phi;
}

double LocalizedSymbol::cell_center(int axis) const
{
    const ShiftedDyadicInterval& q = axis == 0 ? cube_.q1 : axis == 1 ? cube_.q2 : cube_.q3;
    return q.center() / q.length();
}

cplx LocalizedSymbol::rescaled(double t1, double t2, double t3) const
{
    return planar(cube_.q1.length() * t1, cube_.q2.length() * t2) * third(cube_.q3.length() * t3);
}

std::vector<FourierCoefficient> fourier_coefficients(const LocalizedSymbol& mq, const IndexBox& box, int nodes)
{
    check_aliasing(box, nodes);
    const CellSamples s = sample_cell(mq, nodes);
    const int rp = std::max(box.r1, box.r2);
    const auto planar = planar_sums(s, rp, 1);
    const auto third = third_sums(s, box.r3, 1);
    const auto width = static_cast<std::size_t>(2 * rp + 1);
    const auto& cube = mq.cube();
    const auto c1 = center_numerator(cube.q1), c2 = center_numerator(cube.q2), c3 = center_numerator(cube.q3);

    std::vector<FourierCoefficient> out;
    for (int n1 = -box.r1; n1 <= box.r1; ++n1) {
        for (int n2 = -box.r2; n2 <= box.r2; ++n2) {
            const cplx p = planar[static_cast<std::size_t>(n1 + rp) * width + static_cast<std::size_t>(n2 + rp)] *
                           center_phase(c1, n1, 1) * center_phase(c2, n2, 1);
            for (int n3 = -box.r3; n3 <= box.r3; ++n3) {
                const cplx v = p * third[static_cast<std::size_t>(n3 + box.r3)] * center_phase(c3, n3, 1);
                out.push_back({n1, n2, n3, v, mq.symbol().delta});
            }
        }
    }
    return out;
}

CellHarmonics::CellHarmonics(const LocalizedSymbol& mq, int radius, int nodes) : radius_(radius)
{
    if (radius < 0 || 2 * radius >= nodes) {
        throw std::invalid_argument("aliasing risk: harmonic radius " + std::to_string(radius) + " needs more than " +
                                    std::to_string(2 * radius) + " nodes");
    }
    const CellSamples s = sample_cell(mq, nodes);
    planar_ = planar_sums(s, radius, 2);
    third_ = third_sums(s, radius, 2);
    for (auto& v : planar_) v *= 0.25;
    for (auto& v : third_) v *= 0.5;
    const auto& cube = mq.cube();
    centers_ = {center_numerator(cube.q1), center_numerator(cube.q2), center_numerator(cube.q3)};

    double e_planar = 0.0, e_third = 0.0;
    for (const auto& v : s.planar) e_planar += std::norm(v);
    for (double v : s.third) e_third += v * v;
    cell_energy_ = e_planar * s.weight * s.weight * e_third * s.weight;
}

cplx CellHarmonics::operator()(int h1, int h2, int h3) const
{
    if (std::max({std::abs(h1), std::abs(h2), std::abs(h3)}) > radius_) throw std::out_of_range("harmonic outside radius");
    const auto width = static_cast<std::size_t>(2 * radius_ + 1);
    return planar_[static_cast<std::size_t>(h1 + radius_) * width + static_cast<std::size_t>(h2 + radius_)] *
           third_[static_cast<std::size_t>(h3 + radius_)] * center_phase(centers_[0], h1, 2) *
           center_phase(centers_[1], h2, 2) * center_phase(centers_[2], h3, 2);
}

double CellHarmonics::captured_energy() const
{
    double p = 0.0, t = 0.0;
    for (const auto& v : planar_) p += std::norm(v);
    for (const auto& v : third_) t += std::norm(v);
    return 8.0 * p * t;
}

cplx CellHarmonics::resynthesize(double u1, double u2, double u3) const
{
    const auto width = static_cast<std::size_t>(2 * radius_ + 1);
    cplx p{};
    for (int h1 = -radius_; h1 <= radius_; ++h1) {
        for (int h2 = -radius_; h2 <= radius_; ++h2) {
            p += planar_[static_cast<std::size_t>(h1 + radius_) * width + static_cast<std::size_t>(h2 + radius_)] *
                 std::polar(1.0, std::numbers::pi * (h1 * u1 + h2 * u2));
        }
    }
    cplx t{};
    for (int h = -radius_; h <= radius_; ++h) {
        t += third_[static_cast<std::size_t>(h + radius_)] * std::polar(1.0, std::numbers::pi * h * u3);
    }
    return p * t;
}

WhitneySquare representative_square(int n, double radius, const Annulus& annulus)
{
    const double theta = 0.5 * (cone_lower_angle(n) + cone_upper_angle(n));
    const auto found = WhitneyCover(n, annulus).containing(radius * std::cos(theta), radius * std::sin(theta));
    if (found.empty()) throw std::runtime_error("no square of cone " + std::to_string(n) + " at the requested radius");
    auto score = [](const WhitneySquare& q) {
        const bool unshifted = q.q1.shift == 0 && q.q2.shift == 0;
        return std::pair(unshifted ? 0 : 1, std::abs(std::log(proportionality(q))));
    };
    return *std::min_element(found.begin(), found.end(),
                             [&](const WhitneySquare& a, const WhitneySquare& b) { return score(a) < score(b); });
}

DecayReport coefficient_decay_report(double delta, int nmax, const DecayOptions& opt)
{
    if (!std::isfinite(delta) || delta < 0.0) throw std::domain_error("delta must be finite and nonnegative");
    if (nmax < 1) throw std::invalid_argument("nmax must be at least 1");
    if (nmax > kMaxDecayCone) {
        throw BudgetError("nmax " + std::to_string(nmax) + " exceeds the cone budget " + std::to_string(kMaxDecayCone),
                          static_cast<double>(nmax));
    }
    const Symbol m = delta > 0.0 ? exp_decay_symbol(delta) : sign_symbol();
    const PartitionOfUnity partition(opt.annulus);
    auto cube_for = [&](int n) {
        return LocalizedSymbol(m, complete_to_cube(representative_square(n, opt.radius, opt.annulus)), partition);
    };
    auto envelope = [&](int n) { return std::exp(-delta * std::sqrt(static_cast<double>(n))) + std::pow(n, -3.0); };

    DecayReport rep;
    rep.delta = delta;
    rep.exponential_gain = delta > 0.0;
    const IndexBox box{opt.index_radius, opt.index_radius, opt.index_radius};
    for (int n = 1; n <= nmax; ++n) {
        const auto coeffs = fourier_coefficients(cube_for(n), box, opt.nodes);
        double mx = 0.0;
        for (const auto& c : coeffs) mx = std::max(mx, std::abs(c.value));
        rep.rows.push_back({n, 1, mx, 0.0});
    }
    for (const auto& r : rep.rows) {
        if (r.n <= opt.fit_max_cone) rep.c0 = std::max(rep.c0, r.max_coeff / envelope(r.n));
    }
    rep.envelope_pass = true;
    for (auto& r : rep.rows) {
        r.envelope = rep.c0 * envelope(r.n);
        if (r.max_coeff > r.envelope * (1.0 + 1e-12)) rep.envelope_pass = false;
    }

    const LocalizedSymbol first = cube_for(1);
    const int lattice_nodes = std::max(opt.verification_nodes, 8 * opt.lattice_max);
    const auto sweep = fourier_coefficients(first, {opt.lattice_max, 0, 0}, lattice_nodes);
    const double c000 = std::abs(sweep[static_cast<std::size_t>(opt.lattice_max)].value);
    std::vector<double> lx, ly;
    for (int n1 = 0; n1 <= opt.lattice_max; ++n1) {
        const double ratio = std::abs(sweep[static_cast<std::size_t>(n1 + opt.lattice_max)].value) / c000;
        rep.lattice.push_back({n1, ratio});
        if (n1 >= 1 && ratio > 0.0) {
            lx.push_back(1.0 + n1);
            ly.push_back(ratio);
        }
    }
    if (lx.size() >= 2) rep.lattice_slope = loglog_fit(lx, ly).slope;
    rep.lattice_pass = lx.size() >= 2 && rep.lattice_slope <= opt.lattice_slope_bound;

    const IndexBox qbox{opt.quadrature_radius, opt.quadrature_radius, opt.quadrature_radius};
    const auto coarse = fourier_coefficients(first, qbox, opt.nodes);
    const auto fine = fourier_coefficients(first, qbox, opt.verification_nodes);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        diff = std::max(diff, std::abs(coarse[i].value - fine[i].value));
        scale = std::max(scale, std::abs(fine[i].value));
    }
    rep.quadrature_change = scale > 0.0 ? diff / scale : 0.0;
    rep.quadrature_pass = rep.quadrature_change <= opt.quadrature_tolerance;

    rep.scaling.experiment = "coefficient_decay";
    std::vector<double> xs, ys;
    for (const auto& r : rep.rows) {
        rep.scaling.rows.push_back({static_cast<double>(r.n), r.max_coeff, 0.0});
        if (r.max_coeff > 0.0) {
            xs.push_back(r.n);
            ys.push_back(r.max_coeff);
        }
    }
    if (xs.size() >= 3) {
        const auto fit = loglog_fit(xs, ys);
        rep.scaling.slope = fit.slope;
        rep.scaling.slope_ci = 1.96 * fit.slope_stderr;
    }
    return rep;
}

}  // namespace bhtlab
