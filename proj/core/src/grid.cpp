#include "bhtlab/grid.hpp"

#include "bhtlab/fft.hpp"
#include "bhtlab/summation.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace bhtlab {
namespace {

// e^{sign * 2 pi i * m * x0 / L}, with the argument reduced before scaling by 2 pi.
cplx offset_phase(long m, double x0, double period, double sign)
{
    double turns = std::remainder(static_cast<double>(m) * (x0 / period), 1.0);
    return std::polar(1.0, sign * 2.0 * std::numbers::pi * turns);
}

}  // namespace

Grid::Grid(std::size_t samples, double period, double left)
    : samples_(samples), period_(period), left_(left)
{
    if (samples < 8 || !std::has_single_bit(samples))
        throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(samples));
    if (!(period > 0.0) || !std::isfinite(period))
        throw std::invalid_argument("grid period must be positive and finite");
    if (!std::isfinite(left)) throw std::invalid_argument("grid origin must be finite");
}

std::optional<std::size_t> Grid::slot_of_index(long m) const
{
    long half = static_cast<long>(samples_ / 2);
    if (m < -half || m >= half) return std::nullopt;
    return static_cast<std::size_t>(m + half);
}

bool Grid::resolves(double max_abs_frequency) const
{
    return max_abs_frequency * period_ < static_cast<double>(samples_ / 2);
}

SampledFunction::SampledFunction(Grid grid, std::vector<cplx> values)
    : grid_(grid), values_(std::move(values))
{
    if (values_.size() != grid_.size())
        throw std::invalid_argument("sample count does not match grid size");
    for (const cplx& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("sampled function contains non-finite values");
}

SampledFunction SampledFunction::zeros(const Grid& grid)
{
    return {grid, std::vector<cplx>(grid.size())};
}

Spectrum::Spectrum(Grid grid, std::vector<cplx> coeffs) : grid_(grid), coeffs_(std::move(coeffs))
{
    if (coeffs_.size() != grid_.size())
        throw std::invalid_argument("coefficient count does not match grid size");
}

cplx Spectrum::evaluate(double x) const
{
    CompensatedSum<cplx> acc;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == cplx{}) continue;
        double turns = std::remainder(grid_.frequency(i) * x, 1.0);
        acc.add(coeffs_[i] * std::polar(1.0, 2.0 * std::numbers::pi * turns));
    }
    return acc.value() / grid_.period();
}

Spectrum forward_transform(const SampledFunction& f)
{
    const Grid& g = f.grid();
    const std::size_t n = g.size();
    std::vector<cplx> work(f.values().begin(), f.values().end());
    fft::forward(work);
    std::vector<cplx> coeffs(n);
    const double h = g.spacing();
    for (std::size_t i = 0; i < n; ++i) {
        long m = g.index_of_slot(i);
        std::size_t k = static_cast<std::size_t>((m + static_cast<long>(n)) % static_cast<long>(n));
        coeffs[i] = h * work[k] * offset_phase(m, g.left(), g.period(), -1.0);
    }
    return {g, std::move(coeffs)};
}

SampledFunction inverse_transform(const Spectrum& s)
{
    const Grid& g = s.grid();
    const std::size_t n = g.size();
    std::vector<cplx> work(n);
    for (std::size_t i = 0; i < n; ++i) {
        long m = g.index_of_slot(i);
        std::size_t k = static_cast<std::size_t>((m + static_cast<long>(n)) % static_cast<long>(n));
        work[k] = s[i] * offset_phase(m, g.left(), g.period(), 1.0);
    }
    fft::backward(work);
    const double scale = 1.0 / g.period();
    for (cplx& v : work) v *= scale;
    return {g, std::move(work)};
}

double lp_quasinorm(const SampledFunction& f, double p, std::optional<Window> window)
{
    if (!(p > 0.0)) throw std::domain_error("lp_quasinorm requires p > 0");
    const Grid& g = f.grid();
    CompensatedSum<double> acc;
    std::size_t count = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (window) {
            double x = g.x(j);
            if (x < window->lo || x >= window->hi) continue;
        }
        ++count;
        acc.add(std::pow(std::abs(f[j]), p));
    }
    if (count == 0) throw std::invalid_argument("lp_quasinorm window contains no grid points");
    return std::pow(g.spacing() * acc.value(), 1.0 / p);
}

double flp_norm(const Spectrum& s, double q)
{
    if (!(q >= 1.0)) throw std::domain_error("flp_norm requires q >= 1");
    CompensatedSum<double> acc;
    for (const cplx& c : s.coeffs()) acc.add(std::pow(std::abs(c), q));
    return std::pow(acc.value() / s.grid().period(), 1.0 / q);
}

double flp_norm(const SampledFunction& f, double q)
{
    if (!(q >= 1.0)) throw std::domain_error("flp_norm requires q >= 1");
    return flp_norm(forward_transform(f), q);
}

SampledFunction translate(const SampledFunction& f, double t)
{
    Spectrum s = forward_transform(f);
    auto& c = s.mutable_coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        double turns = std::remainder(s.grid().frequency(i) * t, 1.0);
        c[i] *= std::polar(1.0, -2.0 * std::numbers::pi * turns);
    }
    return inverse_transform(s);
}

}  // namespace bhtlab
