#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace voxcrf {

// Seeded generator used for every random draw in the library.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Distributions are implemented here rather than taken from
// <random>, whose algorithms are implementation-defined:
//   uniform()  top 53 bits of one engine output scaled by 2^-53, in [0, 1)
//   normal()   Box-Muller on two uniforms (u1, u2), returning
//              sqrt(-2 ln(1 - u1)) * cos(2 pi u2); no value is cached
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    // Uniform integer in [0, n).
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace voxcrf
