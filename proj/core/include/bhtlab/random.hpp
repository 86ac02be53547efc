#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace bhtlab {

// Deterministic random stream keyed by (seed, index, salt). Uses only the engine's raw
// output, so values are identical across standard library implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

    std::uint64_t bits() { return engine_(); }
    int sign() { return (engine_() >> 63) ? 1 : -1; }
    double uniform();  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    std::complex<double> complex_normal();  // E|z|^2 = 1
    std::uint64_t below(std::uint64_t n);   // uniform in [0, n)

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace bhtlab
