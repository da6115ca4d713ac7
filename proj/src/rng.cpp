#include "emglrt/rng.hpp"

#include <cmath>
#include <numbers>

namespace emglrt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ (stream * 0x632be59bd9b4e019ULL))) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::index(std::uint64_t n) {
    // rejection keeps the draw unbiased
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(2.0 * std::numbers::pi * u2);
    have_spare_ = true;
    return rad * std::cos(2.0 * std::numbers::pi * u2);
}

cplx Rng::complex_normal(double variance) {
    const double sd = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {sd * re, sd * im};
}

} // namespace emglrt
