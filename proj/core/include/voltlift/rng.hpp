#pragma once

#include <cstdint>
#include <vector>

// Counter-based Gaussian streams: every increment is a pure function of
// (seed, path, step, mode), so paths are reproducible and independent of
// scheduling order.

namespace voltlift::rng {

std::uint64_t mix64(std::uint64_t x);

class GaussianStream {
  public:
    GaussianStream(std::uint64_t seed, std::uint64_t path_index);

    // standard normal draw for (step, mode)
    double normal(std::uint64_t step, std::uint64_t mode) const;

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
};

// N(0, dt) increments scaled by sqrt(noise_eigs[mode]), step-major layout
// [step * modes + mode].
std::vector<double> gaussian_increments(std::uint64_t seed, std::uint64_t path_index,
                                        std::size_t steps, std::size_t modes, double dt,
                                        const std::vector<double>& noise_eigs);

}  // namespace voltlift::rng
