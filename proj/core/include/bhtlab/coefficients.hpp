#pragma once

#include "bhtlab/counterexample.hpp"
#include "bhtlab/multiplier.hpp"
#include "bhtlab/whitney.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace bhtlab {

// Plateau for the third frequency slot: 1 on (9/10)Q3, 0 outside (12/10)Q3.
double third_slot_plateau(const ShiftedDyadicInterval& q3, double xi3);

// m(xi1, xi2) phi_Q(xi1, xi2) plateau_Q3(xi3) for one frequency cube.
class LocalizedSymbol {
public:
    LocalizedSymbol(Symbol m, FrequencyCube cube, const PartitionOfUnity& partition);

    const FrequencyCube& cube() const { return cube_; }
    const Symbol& symbol() const { return m_; }

    cplx planar(double xi1, double xi2) const;
    double third(double xi3) const { return third_slot_plateau(cube_.q3, xi3); }
    cplx operator()(double xi1, double xi2, double xi3) const { return planar(xi1, xi2) * third(xi3); }

    // Value at xi_j = |Q_j| t_j. Each axis is rescaled by its own interval length, which puts the
    // support inside a cell of side 2 around center(Q_j) / |Q_j|.
    cplx rescaled(double t1, double t2, double t3) const;
    double cell_center(int axis) const;

private:
    Symbol m_;
    FrequencyCube cube_;
    std::vector<WhitneySquare> overlap_;
};

struct FourierCoefficient {
    int n1 = 0;
    int n2 = 0;
    int n3 = 0;
    cplx value;
    double delta = 0.0;
};

// |n_j| <= r_j.
struct IndexBox {
    int r1 = 2;
    int r2 = 2;
    int r3 = 2;
};

inline constexpr int kDefaultCoefficientNodes = 64;

// int m_Q(|Q1| t1, |Q2| t2, |Q3| t3) e^{-2 pi i n.t} dt by the tensor trapezoid rule on the cell.
// Throws "aliasing risk" when some |n_j| exceeds nodes / 8.
std::vector<FourierCoefficient> fourier_coefficients(const LocalizedSymbol& mq, const IndexBox& box,
                                                     int nodes = kDefaultCoefficientNodes);

// Period-2 harmonics c_h = (1/8) int_cell g(t) e^{-pi i h.t} dt of the rescaled symbol; an integer
// index n above corresponds to h = 2n with C_n = 8 c_{2n}.
class CellHarmonics {
public:
    CellHarmonics(const LocalizedSymbol& mq, int radius, int nodes);

    int radius() const { return radius_; }
    cplx operator()(int h1, int h2, int h3) const;
    // 8 sum_h |c_h|^2, the energy captured by the truncated series.
    double captured_energy() const;
    // int_cell |g|^2 on the same nodes.
    double cell_energy() const { return cell_energy_; }
    // Truncated series at rescaled offsets u_j = t_j - cell_center(j).
    cplx resynthesize(double u1, double u2, double u3) const;

private:
    int radius_;
    std::vector<cplx> planar_;  // (2r+1)^2, row h1, column h2
    std::vector<cplx> third_;   // 2r+1
    std::array<std::int64_t, 3> centers_{};  // cell centers as numerators over 6
    double cell_energy_ = 0.0;
};

struct DecayOptions {
    int nodes = kDefaultCoefficientNodes;
    int verification_nodes = 128;
    int index_radius = 2;      // max over |n_j| <= this
    int lattice_max = 16;      // |n1| sweep for the lattice-direction decay
    int fit_max_cone = 4;      // envelope constant fitted on cones n <= this
    double radius = 1.5;       // representative cubes sit at this distance from the origin
    Annulus annulus{1.0, 2.0};
    double lattice_slope_bound = -6.0;
    double quadrature_tolerance = 1e-8;
    int quadrature_radius = 8;
};

struct DecayRow {
    int n = 0;
    std::int64_t slot = 1;
    double max_coeff = 0.0;  // max over the index box of |C|
    double envelope = 0.0;   // c0 (e^{-delta sqrt n} + n^-3)
};

struct LatticeRow {
    int n1 = 0;
    double ratio = 0.0;  // |C_{n1,0,0}| / |C_{0,0,0}|
};

struct DecayReport {
    double delta = 0.0;
    bool exponential_gain = false;  // false when delta = 0: the exponential factor is identically 1
    double c0 = 0.0;
    std::vector<DecayRow> rows;
    bool envelope_pass = false;

    std::vector<LatticeRow> lattice;
    double lattice_slope = 0.0;  // log ratio against log(1 + |n1|), nonzero ratios only
    bool lattice_pass = false;

    double quadrature_change = 0.0;  // relative change between the two node counts, cone 1
    bool quadrature_pass = false;

    ScalingReport scaling;
};

// Largest cone index accepted by the decay report.
inline constexpr int kMaxDecayCone = 1024;

// The square holding the point at the given radius and mid-angle of C_n, shift (0, 0), with
// proportionality closest to 1.
WhitneySquare representative_square(int n, double radius, const Annulus& annulus);

// exp_decay_symbol(delta) for delta > 0, the sign symbol for delta = 0.
DecayReport coefficient_decay_report(double delta, int nmax, const DecayOptions& opt = {});

}  // namespace bhtlab
