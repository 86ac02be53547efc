#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <type_traits>

namespace bhtlab {

// Neumaier-compensated running sum; order-stable and accurate for long reductions.
template <class T>
class CompensatedSum {
public:
    void add(T v)
    {
        if constexpr (std::is_floating_point_v<T>) {
            step(sum_, comp_, v);
        } else {
            double re = sum_.real(), cre = comp_.real();
            double im = sum_.imag(), cim = comp_.imag();
            step(re, cre, v.real());
            step(im, cim, v.imag());
            sum_ = {re, im};
            comp_ = {cre, cim};
        }
    }
    T value() const { return sum_ + comp_; }

private:
    static void step(double& s, double& c, double v)
    {
        double t = s + v;
        if (std::abs(s) >= std::abs(v)) c += (s - t) + v;
        else c += (v - t) + s;
        s = t;
    }
    T sum_{};
    T comp_{};
};

template <class T>
T compensated_sum(std::span<const T> values)
{
    CompensatedSum<T> acc;
    for (const T& v : values) acc.add(v);
    return acc.value();
}

}  // namespace bhtlab
