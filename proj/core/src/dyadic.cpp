#include "bhtlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bhtlab {

namespace {

wide_int pow2(int e)
{
    if (e < 0 || e > 120) throw std::out_of_range("scale difference out of range: " + std::to_string(e));
    return static_cast<wide_int>(1) << e;
}

}  // namespace

double ShiftedDyadicInterval::length() const { return std::ldexp(1.0, -scale); }
double ShiftedDyadicInterval::lo() const { return std::ldexp(static_cast<double>(lo_numerator()) / 3.0, -scale); }
double ShiftedDyadicInterval::hi() const { return std::ldexp(static_cast<double>(lo_numerator() + 3) / 3.0, -scale); }
double ShiftedDyadicInterval::center() const
{
    return std::ldexp((static_cast<double>(lo_numerator()) + 1.5) / 3.0, -scale);
}

ShiftedDyadicInterval make_interval(int scale, std::int64_t index, int shift)
{
    if (shift < -1 || shift > 1) throw std::invalid_argument("shift must be -1, 0 or 1 (thirds)");
    return {scale, index, shift};
}

ShiftedDyadicInterval interval_containing(double x, int scale, int shift)
{
    if (!std::isfinite(x)) throw std::invalid_argument("interval_containing: non-finite point");
    const double u = std::ldexp(x, scale) - shift / 3.0;
    auto j = static_cast<std::int64_t>(std::floor(u));
    auto q = make_interval(scale, j, shift);
    // Correct floor rounding near endpoints so that lo <= x < hi holds in floating point.
    if (x < q.lo()) --q.index;
    else if (x >= q.hi()) ++q.index;
    return q;
}

wide_int scaled_lo(const ShiftedDyadicInterval& q, int common_scale)
{
    return static_cast<wide_int>(q.lo_numerator()) * pow2(common_scale - q.scale);
}

wide_int scaled_hi(const ShiftedDyadicInterval& q, int common_scale)
{
    return static_cast<wide_int>(q.lo_numerator() + 3) * pow2(common_scale - q.scale);
}

bool interiors_overlap(const ShiftedDyadicInterval& a, const ShiftedDyadicInterval& b)
{
    const int k = std::max(a.scale, b.scale);
    return scaled_lo(a, k) < scaled_hi(b, k) && scaled_lo(b, k) < scaled_hi(a, k);
}

bool sum_set_contained(const ShiftedDyadicInterval& q1, const ShiftedDyadicInterval& q2,
                       const ShiftedDyadicInterval& q3)
{
    // Everything multiplied by 20: the sum set is [-18(b1+b2), -18(a1+a2)] and the
    // (7/10)-core of q3 is [17 a3 + 3 b3, 3 a3 + 17 b3].
    const int k = std::max({q1.scale, q2.scale, q3.scale});
    const wide_int a1 = scaled_lo(q1, k), b1 = scaled_hi(q1, k);
    const wide_int a2 = scaled_lo(q2, k), b2 = scaled_hi(q2, k);
    const wide_int a3 = scaled_lo(q3, k), b3 = scaled_hi(q3, k);
    return -18 * (b1 + b2) >= 17 * a3 + 3 * b3 && -18 * (a1 + a2) <= 3 * a3 + 17 * b3;
}

}  // namespace bhtlab
