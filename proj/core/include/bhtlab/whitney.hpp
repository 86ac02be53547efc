#pragma once

#include "bhtlab/dyadic.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bhtlab {

// Cone A = {xi2 > |xi1|} is split into angular bands C_n graded by rho = dist(xi, diagonal) / |xi|:
// C_1: rho in [sqrt3/2, 1], C_2: [1/2, sqrt3/2], C_n: [1/sqrt(n+2), 1/sqrt(n+1)] for n >= 3.
// Boundary points go to the smaller n. Throws at the origin; nullopt outside cone A.
std::optional<int> cone_index(double xi1, double xi2);

// Polar angles (from the xi1 axis) bounding C_n. The lower one carries the borderline L_n.
double cone_lower_angle(int n);
double cone_upper_angle(int n);
// Slope of L_n: tan(7pi/12), tan(5pi/12), tan(pi/4 + asin(1/sqrt(n+2))).
double borderline(int n);

// Target ratio diam(Q) / dist(Q, 0) for squares of C_n: 1e-4 (1/sqrt(n+1) - 1/sqrt(n+2)).
double whitney_constant(int n);
// Admitted squares keep diam / (whitney_constant * dist) within this factor of 1.
inline constexpr double kProportionalitySlack = 4.0;
inline constexpr std::size_t kSquareBudget = 100000;

struct WhitneySquare {
    ShiftedDyadicInterval q1;
    ShiftedDyadicInterval q2;
    int cone = 0;
    std::int64_t slot = 0;  // 1-based within a materialized collection; 0 when unassigned

    double side() const { return q1.length(); }
    double diameter() const;
    double center1() const { return q1.center(); }
    double center2() const { return q2.center(); }
    // Infimum distance from the origin.
    double distance() const;
    // Polar angle range over the closed square; requires the square to lie in the upper half plane.
    std::pair<double, double> angle_range() const;

    friend bool operator==(const WhitneySquare&, const WhitneySquare&) = default;
};

// diam / (constant_scale * whitney_constant(cone) * distance).
double proportionality(const WhitneySquare& q, double constant_scale = 1.0);
// Meets C_n, misses L_n and the diagonal, proportionality within the slack. Scale-free.
// constant_scale multiplies the Whitney constant; coarser covers use values above 1.
bool admissible_shape(const WhitneySquare& q, double constant_scale = 1.0);

// Scale-free identity of a square: dilating by 2 keeps (j1, shift1, j2, shift2).
struct SlotPattern {
    std::int64_t j1 = 0;
    int shift1 = 0;
    std::int64_t j2 = 0;
    int shift2 = 0;

    friend bool operator==(const SlotPattern&, const SlotPattern&) = default;
    friend auto operator<=>(const SlotPattern&, const SlotPattern&) = default;
};

SlotPattern pattern_of(const WhitneySquare& q);
WhitneySquare square_at(const SlotPattern& p, int scale, int cone);

struct Annulus {
    double rmin = 1.0;
    double rmax = 2.0;
    void validate() const;
};

struct AngularWindow {
    double lo = 0.0;
    double hi = 0.0;
};

class BudgetError : public std::invalid_argument {
public:
    BudgetError(const std::string& what, double estimate) : std::invalid_argument(what), estimate_(estimate) {}
    double estimate() const { return estimate_; }

private:
    double estimate_;
};

// The Whitney collection of C_n restricted to inf-distances in an annulus, queried lazily.
class WhitneyCover {
public:
    WhitneyCover(int n, Annulus annulus, double constant_scale = 1.0);

    int cone() const { return n_; }
    double constant() const { return constant_scale_ * whitney_constant(n_); }
    const Annulus& annulus() const { return annulus_; }
    AngularWindow cone_window() const { return {cone_lower_angle(n_), cone_upper_angle(n_)}; }

    bool admits(const WhitneySquare& q) const;
    // Every admitted square holding the point (half-open spans).
    std::vector<WhitneySquare> containing(double xi1, double xi2) const;
    // Scales 2^-k that can carry admitted squares inside the annulus, as [kmin, kmax].
    std::pair<int, int> scale_range() const;
    // All scales of one pattern that fall inside the annulus, coarsest first.
    std::vector<WhitneySquare> family(const SlotPattern& p) const;

    // Area-based estimate of the number of squares whose centers fall in the window.
    double estimated_count(const AngularWindow& w) const;
    // Admitted squares at one fixed scale of the unrestricted collection (area estimate).
    double squares_per_scale() const;
    // Window centered on the cone's mid-angle, shrunk until the estimate fits the budget.
    AngularWindow window_for_budget(std::size_t budget) const;

    // Materialize the squares whose centers fall in the window.
    std::vector<WhitneySquare> enumerate(const AngularWindow& w, std::size_t budget = kSquareBudget) const;

private:
    int n_;
    Annulus annulus_;
    double constant_scale_;
};

struct WhitneyCollection {
    int cone = 0;
    Annulus annulus;
    AngularWindow window;
    std::vector<WhitneySquare> squares;  // sorted by (scale, slot)
    std::vector<SlotPattern> slots;      // slots[k - 1] is the pattern of slot k, in angular order
};

// Materialized cover. Without a window the whole cone is requested and BudgetError is raised
// when that exceeds the budget.
WhitneyCollection whitney_cover(int n, Annulus annulus, std::optional<AngularWindow> window = std::nullopt,
                                std::size_t budget = kSquareBudget);
// Squares of slot k (1-based), one per scale.
std::vector<WhitneySquare> subcollection(const WhitneyCollection& cover, std::int64_t slot);

// 1 on |t| <= 0.35, 0 on |t| >= 0.4, smooth in between.
double plateau_profile(double t);
// eta((xi - center) / side) with eta(t1, t2) = plateau(t1) plateau(t2); supported in (8/10)Q.
double candidate_bump(const WhitneySquare& q, double xi1, double xi2);

class CoverGap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// phi_Q = b_Q / sum_Q' b_Q' over the covers of every cone, restricted to one annulus.
class PartitionOfUnity {
public:
    explicit PartitionOfUnity(Annulus annulus);

    struct Weight {
        WhitneySquare square;
        double value = 0.0;
    };

    const Annulus& annulus() const { return annulus_; }
    // Sum of candidate bumps at the point.
    double total(double xi1, double xi2) const;
    // Nonzero phi_Q at the point; CoverGap when no bump reaches it.
    std::vector<Weight> weights(double xi1, double xi2) const;
    double operator()(const WhitneySquare& q, double xi1, double xi2) const;

    // Admitted squares of every cone whose (8/10)-core meets that of q, q included.
    std::vector<WhitneySquare> overlapping(const WhitneySquare& q) const;
    // phi_q from a precomputed overlapping() list; avoids repeated cover queries.
    static double normalized(const WhitneySquare& q, std::span<const WhitneySquare> overlap, double xi1, double xi2);

private:
    std::vector<WhitneySquare> candidates(double xi1, double xi2) const;
    Annulus annulus_;
};

struct CoverageReport {
    std::size_t points = 0;
    int min_count = 0;  // squares of cones n-1..n+1 whose (7/10)-core holds the point
    int max_count = 0;
    double max_partition_error = 0.0;
    bool pass = false;  // counts in [1, 50] and partition error at most 1e-10
};

// Seeded points of C_n within the window, log-uniform in radius over the annulus pulled in by 1%.
CoverageReport coverage_check(int n, const Annulus& annulus, const AngularWindow& window, std::size_t points,
                              std::uint64_t seed);

struct FrequencyCube {
    ShiftedDyadicInterval q1;
    ShiftedDyadicInterval q2;
    ShiftedDyadicInterval q3;
    WhitneySquare source;

    double side() const { return q1.length(); }
};

// Largest Q3 searched, as a multiple of the square's side.
inline constexpr int kMaxCubeMagnification = 8;

// First Q3 with -(9/10)Q1 - (9/10)Q2 inside (7/10)Q3, searching lengths l, 2l, 4l, 8l, shifts
// 0, +1/3, -1/3, then increasing index.
FrequencyCube complete_to_cube(const WhitneySquare& q);

}  // namespace bhtlab
