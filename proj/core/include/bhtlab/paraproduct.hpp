#pragma once

#include "bhtlab/counterexample.hpp"
#include "bhtlab/grid.hpp"
#include "bhtlab/whitney.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bhtlab {

// I = 2^-l [m, m + 1] with frequency intervals of length 2^l.
struct TriTile {
    int l = 0;
    std::int64_t m = 0;
    std::array<Interval, 3> omega{};
    std::size_t cube = 0;  // index into TileCollection::cubes

    double time_length() const;
    double time_lo() const;
    double time_hi() const;
};

struct TileCollection {
    std::vector<FrequencyCube> cubes;
    std::vector<TriTile> tiles;
    Window window{0.0, 0.0};
};

// The third interval has the common length |Q1| and is centered on -(center(Q1) + center(Q2)),
// inside Q3, so every tile is a Heisenberg box.
std::array<Interval, 3> tile_frequencies(const FrequencyCube& cube);

// Tiles for every dyadic I of length 1 / |Q1| inside the window, for each cube.
TileCollection build_tiles(std::span<const FrequencyCube> family, Window window);

using BumpProfile = std::function<double(double)>;
// exp(-2 / (1 - u^2)) on |u| < 1.
double default_packet_profile(double u);

// L2-normalized packet whose spectrum is the profile squeezed onto (9/10)omega, modulated to the
// center of the time interval. Only the nonzero spectral run is stored.
class WavePacket {
public:
    WavePacket(Grid grid, Interval time, Interval omega, std::size_t first_slot, std::vector<cplx> coeffs);

    const Grid& grid() const { return grid_; }
    const Interval& time() const { return time_; }
    const Interval& omega() const { return omega_; }
    std::size_t first_slot() const { return first_; }
    std::span<const cplx> coeffs() const { return coeffs_; }

    Spectrum spectrum() const;
    SampledFunction samples() const;

private:
    Grid grid_;
    Interval time_;
    Interval omega_;
    std::size_t first_;
    std::vector<cplx> coeffs_;
};

WavePacket make_wave_packet(const Grid& grid, Interval time, Interval omega,
                            const BumpProfile& profile = default_packet_profile);

// <f, phi> = int f conj(phi).
cplx packet_pairing(const Spectrum& f, const WavePacket& phi);
// Adds weight * conj(phi) to a spectrum on phi's grid; conj(phi) lives on the reflected band.
void add_reflected(std::vector<cplx>& spectrum, const Grid& grid, const WavePacket& phi, cplx weight);

// Smallest power-of-two sample count whose band holds every frequency interval of the collection.
std::size_t required_model_samples(const TileCollection& coll, double period);

// Wave packets for all three slots of every tile on one grid.
class PacketBank {
public:
    PacketBank(TileCollection coll, Grid grid, const BumpProfile& profile = default_packet_profile);

    const TileCollection& collection() const { return coll_; }
    const Grid& grid() const { return grid_; }
    std::size_t size() const { return coll_.tiles.size(); }
    // slot in {1, 2, 3}
    const WavePacket& packet(std::size_t tile, int slot) const;
    // Pairings of f with every tile's packet in one slot.
    std::vector<cplx> pairings(const SampledFunction& f, int slot) const;
    // First and one-past-last grid indices of the tile's time interval.
    std::pair<std::size_t, std::size_t> time_span(std::size_t tile) const;

private:
    TileCollection coll_;
    Grid grid_;
    std::vector<WavePacket> packets_;  // 3 per tile
    std::vector<std::pair<std::size_t, std::size_t>> spans_;
};

// sum_P c_P |I_P|^-1/2 <f1, phi1_P> <f2, phi2_P> conj(phi3_P); empty coeffs means all ones. The
// output sits at frequencies xi1 + xi2, and int Pi(f1, f2) f3 is the trilinear form.
SampledFunction model_apply(const PacketBank& bank, const SampledFunction& f1, const SampledFunction& f2,
                            std::span<const cplx> coeffs = {});
// sup_P |<f, phi_P>| |I_P|^-1/2 on I_P.
SampledFunction maximal_op(const PacketBank& bank, const SampledFunction& f, int slot = 1);
// (sum_P |<f, phi_P>|^2 / |I_P| on I_P)^{1/2}.
SampledFunction square_op(const PacketBank& bank, const SampledFunction& f, int slot);
// sum_P c_P |I_P|^-1/2 <f1, phi1_P> <f2, phi2_P> <f3, phi3_P>.
cplx trilinear_form(const PacketBank& bank, std::span<const cplx> coeffs, const SampledFunction& f1,
                    const SampledFunction& f2, const SampledFunction& f3);

struct DominationResult {
    double lambda = 0.0;  // |trilinear form| with unit coefficients
    double lhs = 0.0;     // sum_P |I_P|^-1/2 |a1| |a2| |a3|
    double rhs = 0.0;     // int M S S
    bool pass = false;
};

// Standard roles: maximal operator on f1, square functions on f2 and f3. The swapped roles put
// the square functions on f1 and f2 and the maximal operator on f3.
DominationResult domination_check(const PacketBank& bank, const SampledFunction& f1, const SampledFunction& f2,
                                  const SampledFunction& f3, bool swap_roles = false);

// Model families: admissible patterns of C_n under the Whitney constant times this factor, so that
// cubes of side ~1 sit at moderate frequencies.
inline constexpr double kModelConstantScale = 1e4;
inline constexpr double kModelPeriod = 128.0;

struct ModelFamilyOptions {
    int lmin = -2;  // cube sides 2^l for l in [lmin, lmax]
    int lmax = 1;
};

// Patterns of C_n at side 1 with proportionality in [2, 4] (the largest squares the cone admits),
// in angular order.
std::vector<SlotPattern> model_slots(int n);
// Cubes of slot k (1-based) at every side 2^l.
std::vector<FrequencyCube> model_family(int n, std::int64_t k, const ModelFamilyOptions& opt = {});

// Random combination of the bank's packets in one slot with complex Gaussian weights, scaled to
// unit L^p quasi-norm.
SampledFunction random_packet_sum(const PacketBank& bank, int slot, double p, std::uint64_t seed,
                                  std::uint64_t index);

struct HolderOptions {
    double p1 = 2.0;
    double p2 = 2.0;
    std::vector<int> n_list{1, 2, 4, 8, 16};
    std::vector<std::int64_t> slots;  // empty: first, middle and last slot of each cone
    std::vector<double> windows{16.0, 32.0, 64.0};  // nested collections on [-T, T]
    int ensemble = 20;
    std::uint64_t seed = 1;
    ModelFamilyOptions family;
    double slope_tolerance = 0.1;
};

struct HolderRow {
    int n = 0;
    std::int64_t slot = 0;
    double window = 0.0;
    std::size_t tiles = 0;
    double ratio = 0.0;  // max over the ensemble of ||Pi(f1, f2)||_p / (||f1||_p1 ||f2||_p2)
};

struct HolderReport {
    double p = 0.0;
    std::vector<HolderRow> rows;
    // Pooled fits of log ratio over all rows, against log n and against log tile count. A single n
    // leaves slope_vs_n at zero.
    double slope_vs_n = 0.0;
    double slope_vs_size = 0.0;
    bool pass = false;
    ScalingReport scaling;
};

// Target exponent 1/p = 1/p1 + 1/p2; requires p1, p2 >= 1 and p > 1/2.
double holder_target(double p1, double p2);
HolderReport empirical_holder_bound(const HolderOptions& opt);

}  // namespace bhtlab
