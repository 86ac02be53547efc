#pragma once

#include <compare>
#include <cstdint>

namespace bhtlab {

__extension__ typedef __int128 wide_int;

// 2^{-scale} [index + shift/3, index + 1 + shift/3], shift in {-1, 0, 1}.
// Endpoints are rationals with denominator 3 * 2^scale and are compared exactly.
struct ShiftedDyadicInterval {
    int scale = 0;
    std::int64_t index = 0;
    int shift = 0;

    double length() const;
    double lo() const;
    double hi() const;
    double center() const;
    double alpha() const { return shift / 3.0; }

    // Numerator of the left endpoint over 3 * 2^scale.
    std::int64_t lo_numerator() const { return 3 * index + shift; }

    friend bool operator==(const ShiftedDyadicInterval&, const ShiftedDyadicInterval&) = default;
    friend auto operator<=>(const ShiftedDyadicInterval&, const ShiftedDyadicInterval&) = default;
};

ShiftedDyadicInterval make_interval(int scale, std::int64_t index, int shift);
// The interval of the given scale and shift class whose half-open span holds x.
ShiftedDyadicInterval interval_containing(double x, int scale, int shift);

// Endpoint times 3 * 2^common_scale; common_scale must be at least the interval's scale.
wide_int scaled_lo(const ShiftedDyadicInterval& q, int common_scale);
wide_int scaled_hi(const ShiftedDyadicInterval& q, int common_scale);

// Open-interior overlap, exact.
bool interiors_overlap(const ShiftedDyadicInterval& a, const ShiftedDyadicInterval& b);

// -(9/10) q1 - (9/10) q2 inside (7/10) q3, exact.
bool sum_set_contained(const ShiftedDyadicInterval& q1, const ShiftedDyadicInterval& q2,
                       const ShiftedDyadicInterval& q3);

}  // namespace bhtlab
