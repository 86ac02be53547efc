#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace bhtlab {

using cplx = std::complex<double>;

// Uniform periodic grid: x_j = x0 + j*h, frequencies xi_m = m/L for m in [-M/2, M/2).
class Grid {
public:
    Grid(std::size_t samples, double period, double left);

    std::size_t size() const { return samples_; }
    double period() const { return period_; }
    double left() const { return left_; }
    double spacing() const { return period_ / static_cast<double>(samples_); }
    double x(std::size_t j) const { return left_ + static_cast<double>(j) * spacing(); }

    // Frequency index m of spectrum slot i (slots are stored from -M/2 upward).
    long index_of_slot(std::size_t i) const { return static_cast<long>(i) - static_cast<long>(samples_ / 2); }
    std::optional<std::size_t> slot_of_index(long m) const;
    double frequency(std::size_t i) const { return static_cast<double>(index_of_slot(i)) / period_; }
    double nyquist() const { return static_cast<double>(samples_ / 2) / period_; }

    // Largest |xi| strictly representable without touching the Nyquist slot.
    bool resolves(double max_abs_frequency) const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t samples_;
    double period_;
    double left_;
};

class SampledFunction {
public:
    SampledFunction(Grid grid, std::vector<cplx> values);
    static SampledFunction zeros(const Grid& grid);

    template <class F>
    static SampledFunction from(const Grid& grid, F&& f)
    {
        std::vector<cplx> v(grid.size());
        for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
        return {grid, std::move(v)};
    }

    const Grid& grid() const { return grid_; }
    std::span<const cplx> values() const { return values_; }
    std::vector<cplx>& mutable_values() { return values_; }
    cplx operator[](std::size_t j) const { return values_[j]; }
    std::size_t size() const { return values_.size(); }

private:
    Grid grid_;
    std::vector<cplx> values_;
};

// coeffs[i] approximates the continuous transform at frequency grid.frequency(i).
class Spectrum {
public:
    Spectrum(Grid grid, std::vector<cplx> coeffs);

    const Grid& grid() const { return grid_; }
    std::span<const cplx> coeffs() const { return coeffs_; }
    std::vector<cplx>& mutable_coeffs() { return coeffs_; }
    cplx operator[](std::size_t i) const { return coeffs_[i]; }
    std::size_t size() const { return coeffs_.size(); }

    // Trigonometric interpolant (1/L) sum_m c_m e^{2 pi i xi_m x} at an arbitrary point.
    cplx evaluate(double x) const;

private:
    Grid grid_;
    std::vector<cplx> coeffs_;
};

struct Window {
    double lo;
    double hi;
};

Spectrum forward_transform(const SampledFunction& f);
SampledFunction inverse_transform(const Spectrum& s);

// (h * sum_{x_j in [lo, hi)} |f(x_j)|^p)^{1/p}; p < 1 gives the quasi-norm.
double lp_quasinorm(const SampledFunction& f, double p, std::optional<Window> window = std::nullopt);
// Same rule on |f^| with frequency weight 1/L.
double flp_norm(const SampledFunction& f, double q);
double flp_norm(const Spectrum& s, double q);

// Shift by t using the spectral interpolant: returns samples of f(x - t).
SampledFunction translate(const SampledFunction& f, double t);

}  // namespace bhtlab
