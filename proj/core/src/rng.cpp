#include "voltlift/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace voltlift::rng {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

double to_unit(std::uint64_t x) {
    // (0,1), never returns 0 so log() below is safe
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

GaussianStream::GaussianStream(std::uint64_t seed, std::uint64_t path_index)
    : key_(seed ^ mix64(path_index + 0x51ab5e11ull)) {}

double GaussianStream::normal(std::uint64_t step, std::uint64_t mode) const {
    const std::uint64_t ctr = step * 0x100000001b3ull + mode;
    const std::uint64_t u1 = mix64(key_ ^ mix64(ctr));
    const std::uint64_t u2 = mix64(u1 + 0x2545f4914f6cdd1dull);
    const double r = std::sqrt(-2.0 * std::log(to_unit(u1)));
    return r * std::cos(kTwoPi * to_unit(u2));
}

std::vector<double> gaussian_increments(std::uint64_t seed, std::uint64_t path_index,
                                        std::size_t steps, std::size_t modes, double dt,
                                        const std::vector<double>& noise_eigs) {
    if (noise_eigs.size() != modes) throw std::invalid_argument("gaussian_increments: eig size");
    if (!(dt > 0.0)) throw std::invalid_argument("gaussian_increments: dt <= 0");
    GaussianStream g(seed, path_index);
    const double sdt = std::sqrt(dt);
    std::vector<double> out(steps * modes);
    for (std::size_t k = 0; k < steps; ++k)
        for (std::size_t m = 0; m < modes; ++m)
            out[k * modes + m] = g.normal(k, m) * sdt * std::sqrt(noise_eigs[m]);
    return out;
}

}  // namespace voltlift::rng
