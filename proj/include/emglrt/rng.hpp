#pragma once

#include <cstdint>
#include <random>

#include "emglrt/common.hpp"

namespace emglrt {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent stream for (seed, trial, stream). Uniforms and normals are
/// produced here rather than through <random> distributions so that draws are
/// identical across standard libraries.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream);

    double uniform(); // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t index(std::uint64_t n); // [0, n)
    double normal();
    cplx complex_normal(double variance); // CN(0, variance)

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace emglrt
