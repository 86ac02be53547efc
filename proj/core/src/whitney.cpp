#include "bhtlab/whitney.hpp"

#include "bhtlab/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <tuple>

namespace bhtlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::array<int, 3> kShifts{0, 1, -1};

void require_cone(int n)
{
    if (n < 1) throw std::invalid_argument("cone index must be at least 1, got " + std::to_string(n));
}

double smooth_step(double u)
{
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / u);
    const double b = std::exp(-1.0 / (1.0 - u));
    return a / (a + b);
}

// Angle of the pattern's center; identical at every scale.
double pattern_angle(const SlotPattern& p)
{
    return std::atan2(3.0 * static_cast<double>(p.j2) + p.shift2 + 1.5, 3.0 * static_cast<double>(p.j1) + p.shift1 + 1.5);
}

double pattern_radius(const SlotPattern& p)
{
    return std::hypot(3.0 * static_cast<double>(p.j2) + p.shift2 + 1.5, 3.0 * static_cast<double>(p.j1) + p.shift1 + 1.5);
}

// Band of admitted inf-distances at side s.
std::pair<double, double> distance_band(double k, double s)
{
    const double d = std::numbers::sqrt2 * s / k;
    return {d / kProportionalitySlack, d * kProportionalitySlack};
}

}  // namespace

std::optional<int> cone_index(double xi1, double xi2)
{
    constexpr double kTieTolerance = 1e-12;
    if (xi1 == 0.0 && xi2 == 0.0) throw std::invalid_argument("cone_index: the origin has no cone");
    if (!std::isfinite(xi1) || !std::isfinite(xi2)) throw std::invalid_argument("cone_index: non-finite point");
    if (!(xi2 > std::abs(xi1))) return std::nullopt;
    const double rho = std::abs(xi1 - xi2) / (std::numbers::sqrt2 * std::hypot(xi1, xi2));
    if (rho >= std::sqrt(3.0) / 2.0) return 1;
    if (rho >= 0.5) return 2;
    const double guess = std::ceil(1.0 / (rho * rho) - 2.0);
    int n = static_cast<int>(std::max(3.0, std::min(guess, 1e9)));
    auto upper = [](int m) { return 1.0 / std::sqrt(m + 1.0); };
    auto lower = [](int m) { return 1.0 / std::sqrt(m + 2.0); };
    while (n > 3 && rho > upper(n)) --n;
    while (rho < lower(n)) ++n;
    // Ties go to the smaller n; decimal inputs land on a boundary only up to rounding.
    while (n > 3 && rho >= lower(n - 1) * (1.0 - kTieTolerance)) --n;
    return n;
}

double cone_lower_angle(int n)
{
    require_cone(n);
    if (n == 1) return 7.0 * kPi / 12.0;
    if (n == 2) return 5.0 * kPi / 12.0;
    return kPi / 4.0 + std::asin(1.0 / std::sqrt(n + 2.0));
}

double cone_upper_angle(int n)
{
    require_cone(n);
    if (n == 1) return 3.0 * kPi / 4.0;
    if (n == 2) return 7.0 * kPi / 12.0;
    return kPi / 4.0 + std::asin(1.0 / std::sqrt(n + 1.0));
}

double borderline(int n) { return std::tan(cone_lower_angle(n)); }

double whitney_constant(int n)
{
    require_cone(n);
    return 1e-4 * (1.0 / std::sqrt(n + 1.0) - 1.0 / std::sqrt(n + 2.0));
}

double WhitneySquare::diameter() const { return side() * std::numbers::sqrt2; }

double WhitneySquare::distance() const
{
    auto axis = [](const ShiftedDyadicInterval& q) {
        const double a = q.lo(), b = q.hi();
        if (a > 0.0) return a;
        if (b < 0.0) return -b;
        return 0.0;
    };
    return std::hypot(axis(q1), axis(q2));
}

std::pair<double, double> WhitneySquare::angle_range() const
{
    const double a1 = q1.lo(), b1 = q1.hi(), a2 = q2.lo(), b2 = q2.hi();
    if (!(a2 > 0.0)) throw std::logic_error("angle_range: square meets the lower half plane");
    // Over the upper half plane atan2 is monotone in each coordinate, so corners give the range.
    return {std::atan2(a2, b1), std::atan2(b2, a1)};
}

double proportionality(const WhitneySquare& q, double constant_scale)
{
    return q.diameter() / (constant_scale * whitney_constant(q.cone) * q.distance());
}

bool admissible_shape(const WhitneySquare& q, double constant_scale)
{
    if (q.cone < 1 || q.q1.scale != q.q2.scale) return false;
    if (!(q.q2.lo() > 0.0)) return false;
    const double r = proportionality(q, constant_scale);
    if (!(r >= 1.0 / kProportionalitySlack && r <= kProportionalitySlack)) return false;
    const auto [tmin, tmax] = q.angle_range();
    const bool meets_cone = tmin <= cone_upper_angle(q.cone) && tmax >= cone_lower_angle(q.cone);
    const bool misses_border = tmin > cone_lower_angle(q.cone) || tmax < cone_lower_angle(q.cone);
    const bool misses_diagonal = tmin > kPi / 4.0 || tmax < kPi / 4.0;
    return meets_cone && misses_border && misses_diagonal;
}

SlotPattern pattern_of(const WhitneySquare& q) { return {q.q1.index, q.q1.shift, q.q2.index, q.q2.shift}; }

WhitneySquare square_at(const SlotPattern& p, int scale, int cone)
{
    return {make_interval(scale, p.j1, p.shift1), make_interval(scale, p.j2, p.shift2), cone, 0};
}

void Annulus::validate() const
{
    if (!std::isfinite(rmin) || !std::isfinite(rmax) || !(rmin > 0.0) || !(rmin < rmax)) {
        std::ostringstream os;
        os << "annulus needs 0 < rmin < rmax, got [" << rmin << ", " << rmax << "]";
        throw std::invalid_argument(os.str());
    }
}

WhitneyCover::WhitneyCover(int n, Annulus annulus, double constant_scale)
    : n_(n), annulus_(annulus), constant_scale_(constant_scale)
{
    require_cone(n);
    annulus_.validate();
    if (!(constant_scale > 0.0) || !std::isfinite(constant_scale)) {
        throw std::invalid_argument("Whitney constant scale must be positive");
    }
}

bool WhitneyCover::admits(const WhitneySquare& q) const
{
    if (q.cone != n_ || !admissible_shape(q, constant_scale_)) return false;
    const double d = q.distance();
    return d >= annulus_.rmin && d <= annulus_.rmax;
}

std::vector<WhitneySquare> WhitneyCover::containing(double xi1, double xi2) const
{
    std::vector<WhitneySquare> out;
    const double r = std::hypot(xi1, xi2);
    if (!(r > 0.0) || !(xi2 > 0.0)) return out;
    const double k = constant();
    const double smin = 0.98 * k * r / (kProportionalitySlack * std::numbers::sqrt2);
    const double smax = 1.02 * kProportionalitySlack * k * r / std::numbers::sqrt2;
    const int kmin = static_cast<int>(std::floor(-std::log2(smax)));
    const int kmax = static_cast<int>(std::ceil(-std::log2(smin)));
    for (int scale = kmin; scale <= kmax; ++scale) {
        for (int a1 : kShifts) {
            for (int a2 : kShifts) {
                WhitneySquare q{interval_containing(xi1, scale, a1), interval_containing(xi2, scale, a2), n_, 0};
                if (admits(q)) out.push_back(q);
            }
        }
    }
    return out;
}

std::pair<int, int> WhitneyCover::scale_range() const
{
    const double k = constant();
    const double smin = k * annulus_.rmin / (kProportionalitySlack * std::numbers::sqrt2);
    const double smax = kProportionalitySlack * k * annulus_.rmax / std::numbers::sqrt2;
    return {static_cast<int>(std::floor(-std::log2(smax))), static_cast<int>(std::ceil(-std::log2(smin)))};
}

std::vector<WhitneySquare> WhitneyCover::family(const SlotPattern& p) const
{
    std::vector<WhitneySquare> out;
    const WhitneySquare base = square_at(p, 0, n_);
    if (!admissible_shape(base, constant_scale_)) return out;
    const double d0 = base.distance();
    const int kmin = static_cast<int>(std::floor(-std::log2(annulus_.rmax / d0))) - 1;
    const int kmax = static_cast<int>(std::ceil(-std::log2(annulus_.rmin / d0))) + 1;
    for (int scale = kmin; scale <= kmax; ++scale) {
        const WhitneySquare q = square_at(p, scale, n_);
        if (admits(q)) out.push_back(q);
    }
    return out;
}

double WhitneyCover::estimated_count(const AngularWindow& w) const
{
    const double dtheta = std::min(w.hi, cone_upper_angle(n_)) - std::max(w.lo, cone_lower_angle(n_));
    if (!(dtheta > 0.0)) return 0.0;
    const auto [kmin, kmax] = scale_range();
    double total = 0.0;
    for (int scale = kmin; scale <= kmax; ++scale) {
        const double s = std::ldexp(1.0, -scale);
        const auto [dlo, dhi] = distance_band(constant(), s);
        const double r1 = std::max(annulus_.rmin, dlo), r2 = std::min(annulus_.rmax, dhi);
        if (r1 >= r2) continue;
        total += static_cast<double>(kShifts.size() * kShifts.size()) * 0.5 * dtheta * (r2 * r2 - r1 * r1) / (s * s);
    }
    return total;
}

double WhitneyCover::squares_per_scale() const
{
    const double dtheta = cone_upper_angle(n_) - cone_lower_angle(n_);
    const double k = constant();
    const double band = 2.0 / (k * k) * (kProportionalitySlack * kProportionalitySlack -
                                          1.0 / (kProportionalitySlack * kProportionalitySlack));
    return static_cast<double>(kShifts.size() * kShifts.size()) * 0.5 * dtheta * band;
}

AngularWindow WhitneyCover::window_for_budget(std::size_t budget) const
{
    const AngularWindow full = cone_window();
    const double count = estimated_count(full);
    if (count <= static_cast<double>(budget)) return full;
    // Golden-section point rather than the midpoint: the midpoint of C_2 is the xi2 axis, which
    // holds no square centers, and a window thinner than one square would come back empty.
    const double mid = full.lo + (std::numbers::phi - 1.0) * (full.hi - full.lo);
    const double half = 0.5 * (full.hi - full.lo) * 0.9 * static_cast<double>(budget) / count;
    return {mid - half, mid + half};
}

std::vector<WhitneySquare> WhitneyCover::enumerate(const AngularWindow& w, std::size_t budget) const
{
    const double estimate = estimated_count(w);
    if (estimate > static_cast<double>(budget)) {
        std::ostringstream os;
        os << "cover of cone " << n_ << " would hold about " << estimate << " squares, over the budget of " << budget
           << "; narrow the annulus or the angular window";
        throw BudgetError(os.str(), estimate);
    }
    std::vector<WhitneySquare> out;
    const auto [kmin, kmax] = scale_range();
    for (int scale = kmin; scale <= kmax; ++scale) {
        const double s = std::ldexp(1.0, -scale);
        const auto [dlo, dhi] = distance_band(constant(), s);
        const double r1 = std::max(annulus_.rmin, dlo), r2 = std::min(annulus_.rmax, dhi);
        if (r1 > r2) continue;
        const double big_r1 = std::max(r1 - 2.0 * s, 0.5 * r1), big_r2 = r2 + 2.0 * s;
        const double slack = 2.0 * s / big_r1;
        const double ta = std::max(w.lo, cone_lower_angle(n_)) - slack;
        const double tb = std::min(w.hi, cone_upper_angle(n_)) + slack;
        if (ta > tb) continue;
        const std::array<double, 4> xs{big_r1 * std::cos(ta), big_r2 * std::cos(ta), big_r1 * std::cos(tb),
                                       big_r2 * std::cos(tb)};
        const double xmin = *std::min_element(xs.begin(), xs.end());
        const double xmax = *std::max_element(xs.begin(), xs.end());
        // Centers must satisfy x / y in [cot(hi), cot(lo)] for the window's angles.
        const double c_hi = 1.0 / std::tan(w.hi), c_lo = 1.0 / std::tan(w.lo);
        for (int a1 : kShifts) {
            const auto jlo = static_cast<std::int64_t>(std::floor(xmin / s - a1 / 3.0)) - 1;
            const auto jhi = static_cast<std::int64_t>(std::floor(xmax / s - a1 / 3.0)) + 1;
            for (std::int64_t j1 = jlo; j1 <= jhi; ++j1) {
                const auto col = make_interval(scale, j1, a1);
                const double x = col.center();
                if (big_r2 <= std::abs(x)) continue;
                double ylo = std::sqrt(std::max(big_r1 * big_r1 - x * x, 0.0));
                double yhi = std::sqrt(big_r2 * big_r2 - x * x);
                if (x > 0.0) {
                    if (c_lo <= 0.0) continue;
                    ylo = std::max(ylo, x / c_lo);
                    if (c_hi > 0.0) yhi = std::min(yhi, x / c_hi);
                } else if (x < 0.0) {
                    if (c_hi >= 0.0) continue;
                    ylo = std::max(ylo, x / c_hi);
                    if (c_lo < 0.0) yhi = std::min(yhi, x / c_lo);
                } else if (c_hi > 0.0 || c_lo < 0.0) {
                    continue;
                }
                if (ylo > yhi) continue;
                for (int a2 : kShifts) {
                    const auto klo = static_cast<std::int64_t>(std::ceil(ylo / s - a2 / 3.0 - 0.5));
                    const auto khi = static_cast<std::int64_t>(std::floor(yhi / s - a2 / 3.0 - 0.5));
                    for (std::int64_t j2 = klo; j2 <= khi; ++j2) {
                        WhitneySquare q{col, make_interval(scale, j2, a2), n_, 0};
                        if (!admits(q)) continue;
                        const double theta = std::atan2(q.center2(), q.center1());
                        if (theta < w.lo || theta > w.hi) continue;
                        out.push_back(q);
                        if (out.size() > budget) {
                            throw BudgetError("cover exceeded the square budget during enumeration",
                                              static_cast<double>(out.size()));
                        }
                    }
                }
            }
        }
    }
    return out;
}

WhitneyCollection whitney_cover(int n, Annulus annulus, std::optional<AngularWindow> window, std::size_t budget)
{
    const WhitneyCover cover(n, annulus);
    WhitneyCollection result;
    result.cone = n;
    result.annulus = annulus;
    result.window = window.value_or(cover.cone_window());
    result.squares = cover.enumerate(result.window, budget);

    std::vector<SlotPattern> patterns;
    patterns.reserve(result.squares.size());
    for (const auto& q : result.squares) patterns.push_back(pattern_of(q));
    std::sort(patterns.begin(), patterns.end());
    patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
    std::stable_sort(patterns.begin(), patterns.end(), [](const SlotPattern& a, const SlotPattern& b) {
        return std::tuple(pattern_angle(a), pattern_radius(a)) < std::tuple(pattern_angle(b), pattern_radius(b));
    });
    std::map<SlotPattern, std::int64_t> rank;
    for (std::size_t i = 0; i < patterns.size(); ++i) rank.emplace(patterns[i], static_cast<std::int64_t>(i) + 1);
    for (auto& q : result.squares) q.slot = rank.at(pattern_of(q));
    std::sort(result.squares.begin(), result.squares.end(), [](const WhitneySquare& a, const WhitneySquare& b) {
        return std::tuple(a.q1.scale, a.slot) < std::tuple(b.q1.scale, b.slot);
    });
    result.slots = std::move(patterns);
    return result;
}

std::vector<WhitneySquare> subcollection(const WhitneyCollection& cover, std::int64_t slot)
{
    if (slot < 1 || slot > static_cast<std::int64_t>(cover.slots.size())) {
        throw std::out_of_range("slot " + std::to_string(slot) + " outside [1, " + std::to_string(cover.slots.size()) +
                                "]");
    }
    std::vector<WhitneySquare> out;
    for (const auto& q : cover.squares) {
        if (q.slot == slot) out.push_back(q);
    }
    return out;
}

double plateau_profile(double t) { return smooth_step((0.4 - std::abs(t)) / 0.05); }

double candidate_bump(const WhitneySquare& q, double xi1, double xi2)
{
    const double s = q.side();
    const double u = plateau_profile((xi1 - q.center1()) / s);
    if (u == 0.0) return 0.0;
    return u * plateau_profile((xi2 - q.center2()) / s);
}

PartitionOfUnity::PartitionOfUnity(Annulus annulus) : annulus_(annulus) { annulus_.validate(); }

std::vector<WhitneySquare> PartitionOfUnity::candidates(double xi1, double xi2) const
{
    std::vector<WhitneySquare> out;
    if (!(xi2 > 0.0)) return out;
    const double theta = std::atan2(xi2, xi1);
    if (theta <= kPi / 4.0) return out;
    int n = 1;
    if (theta < 3.0 * kPi / 4.0) n = cone_index(xi1, xi2).value_or(1);
    // Squares are far smaller than the bands, so only neighbouring cones can reach the point.
    for (int m = std::max(1, n - 1); m <= n + 1; ++m) {
        auto part = WhitneyCover(m, annulus_).containing(xi1, xi2);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

double PartitionOfUnity::total(double xi1, double xi2) const
{
    double sum = 0.0;
    for (const auto& q : candidates(xi1, xi2)) sum += candidate_bump(q, xi1, xi2);
    return sum;
}

std::vector<PartitionOfUnity::Weight> PartitionOfUnity::weights(double xi1, double xi2) const
{
    std::vector<Weight> out;
    double sum = 0.0;
    for (const auto& q : candidates(xi1, xi2)) {
        const double b = candidate_bump(q, xi1, xi2);
        if (b > 0.0) {
            out.push_back({q, b});
            sum += b;
        }
    }
    if (!(sum > 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "cover gap at (" << xi1 << ", " << xi2 << ")";
        throw CoverGap(os.str());
    }
    for (auto& w : out) w.value /= sum;
    return out;
}

double PartitionOfUnity::operator()(const WhitneySquare& q, double xi1, double xi2) const
{
    if (!WhitneyCover(q.cone, annulus_).admits(q)) {
        throw std::invalid_argument("square does not belong to the cover of this annulus");
    }
    const double b = candidate_bump(q, xi1, xi2);
    if (b == 0.0) return 0.0;
    return b / total(xi1, xi2);
}

std::vector<WhitneySquare> PartitionOfUnity::overlapping(const WhitneySquare& q) const
{
    const double s = q.side();
    const double x0 = q.center1() - 0.4 * s, x1 = q.center1() + 0.4 * s;
    const double y0 = q.center2() - 0.4 * s, y1 = q.center2() + 0.4 * s;
    const double rlo = std::max(q.distance(), 1e-300), rhi = q.distance() + q.diameter();
    std::vector<WhitneySquare> out;
    for (int m = std::max(1, q.cone - 2); m <= q.cone + 2; ++m) {
        const WhitneyCover cover(m, annulus_);
        const double k = whitney_constant(m);
        const double smin = 0.98 * k * rlo / (kProportionalitySlack * std::numbers::sqrt2);
        const double smax = 1.02 * kProportionalitySlack * k * rhi / std::numbers::sqrt2;
        const int kmin = static_cast<int>(std::floor(-std::log2(smax)));
        const int kmax = static_cast<int>(std::ceil(-std::log2(smin)));
        for (int scale = kmin; scale <= kmax; ++scale) {
            const double t = std::ldexp(1.0, -scale);
            for (int a1 : kShifts) {
                const auto ilo = static_cast<std::int64_t>(std::floor((x0 - 0.4 * t) / t - a1 / 3.0 - 0.5)) - 1;
                const auto ihi = static_cast<std::int64_t>(std::ceil((x1 + 0.4 * t) / t - a1 / 3.0 - 0.5)) + 1;
                for (int a2 : kShifts) {
                    const auto jlo = static_cast<std::int64_t>(std::floor((y0 - 0.4 * t) / t - a2 / 3.0 - 0.5)) - 1;
                    const auto jhi = static_cast<std::int64_t>(std::ceil((y1 + 0.4 * t) / t - a2 / 3.0 - 0.5)) + 1;
                    for (auto i = ilo; i <= ihi; ++i) {
                        const auto c1 = make_interval(scale, i, a1);
                        if (std::abs(c1.center() - q.center1()) >= 0.4 * (s + t)) continue;
                        for (auto j = jlo; j <= jhi; ++j) {
                            const auto c2 = make_interval(scale, j, a2);
                            if (std::abs(c2.center() - q.center2()) >= 0.4 * (s + t)) continue;
                            WhitneySquare p{c1, c2, m, 0};
                            if (cover.admits(p)) out.push_back(p);
                        }
                    }
                }
            }
        }
    }
    return out;
}

double PartitionOfUnity::normalized(const WhitneySquare& q, std::span<const WhitneySquare> overlap, double xi1,
                                    double xi2)
{
    const double b = candidate_bump(q, xi1, xi2);
    if (b == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& p : overlap) sum += candidate_bump(p, xi1, xi2);
    return b / sum;
}

FrequencyCube complete_to_cube(const WhitneySquare& q)
{
    const double lo = -0.9 * (q.q1.hi() + q.q2.hi());
    const double hi = -0.9 * (q.q1.lo() + q.q2.lo());
    const double mid = 0.5 * (lo + hi);
    for (int factor = 1, drop = 0; factor <= kMaxCubeMagnification; factor *= 2, ++drop) {
        const int scale = q.q1.scale - drop;
        const double len = std::ldexp(1.0, -scale);
        for (int shift : kShifts) {
            const auto centre = static_cast<std::int64_t>(std::floor(mid / len - shift / 3.0 - 0.5));
            for (std::int64_t j = centre - 2; j <= centre + 2; ++j) {
                const auto q3 = make_interval(scale, j, shift);
                if (sum_set_contained(q.q1, q.q2, q3)) return {q.q1, q.q2, q3, q};
            }
        }
    }
    throw std::logic_error("complete_to_cube: no interval up to 8 side lengths holds the sum set");
}

CoverageReport coverage_check(int n, const Annulus& annulus, const AngularWindow& window, std::size_t points,
                              std::uint64_t seed)
{
    annulus.validate();
    const double lo = std::max(window.lo, cone_lower_angle(n));
    const double hi = std::min(window.hi, cone_upper_angle(n));
    if (!(lo < hi)) throw std::invalid_argument("angular window misses the cone");
    const PartitionOfUnity partition(annulus);
    std::vector<WhitneyCover> covers;
    for (int m = std::max(1, n - 1); m <= n + 1; ++m) covers.emplace_back(m, annulus);
    const double log_lo = std::log(1.01 * annulus.rmin), log_hi = std::log(0.99 * annulus.rmax);

    CoverageReport rep;
    rep.points = points;
    rep.min_count = std::numeric_limits<int>::max();
    RandomStream rs(seed, static_cast<std::uint64_t>(n), 0xc0);
    for (std::size_t i = 0; i < points; ++i) {
        const double theta = rs.uniform(lo, hi);
        const double r = std::exp(rs.uniform(log_lo, log_hi));
        const double x = r * std::cos(theta), y = r * std::sin(theta);
        int count = 0;
        for (const auto& cover : covers) {
            for (const auto& q : cover.containing(x, y)) {
                if (std::abs(x - q.center1()) <= 0.35 * q.side() && std::abs(y - q.center2()) <= 0.35 * q.side()) ++count;
            }
        }
        rep.min_count = std::min(rep.min_count, count);
        rep.max_count = std::max(rep.max_count, count);
        double sum = 0.0;
        for (const auto& w : partition.weights(x, y)) sum += w.value;
        rep.max_partition_error = std::max(rep.max_partition_error, std::abs(sum - 1.0));
    }
    if (points == 0) rep.min_count = 0;
    rep.pass = points > 0 && rep.min_count >= 1 && rep.max_count <= 50 && rep.max_partition_error <= 1e-10;
    return rep;
}

}  // namespace bhtlab
