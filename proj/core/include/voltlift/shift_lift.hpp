#pragma once

#include <cstddef>
#include <vector>

#include "voltlift/special.hpp"

// Discretised shift lift: a modified Filipovic space of curves sampled on a
// uniform grid x_j = j h, the shift semigroup S(t)y(x) = y(x+t) acting as
// exact index moves, point evaluations Xi_0 and Xi_inf, the Filipovic norm
// with forward differences, and the ergodicity bound of the shift lift.

namespace voltlift::shift_lift {

using special::WeightParams;

struct ShiftGrid {
    double h = 1e-2;
    double x_max = 10.0;
    WeightParams wparams;  // shift family, delta >= 0, eta >= 0

    std::size_t points() const;  // J + 1 samples, x_j = j h, j = 0..J
    void validate() const;       // x_max/h and 1/h must be integers
};

struct ShiftState {
    std::size_t n_modes = 0;
    std::vector<double> values;  // (J+1) x n_modes, point-major
    std::vector<double> tail;    // y(infinity) proxy, length n_modes

    ShiftState() = default;
    ShiftState(std::size_t n_points, std::size_t modes)
        : n_modes(modes), values(n_points * modes, 0.0), tail(modes, 0.0) {}

    double& at(std::size_t j, std::size_t mode) { return values[j * n_modes + mode]; }
    double at(std::size_t j, std::size_t mode) const { return values[j * n_modes + mode]; }
    std::size_t n_points() const { return n_modes == 0 ? 0 : values.size() / n_modes; }
};

// |||y|||^2 = ||y(1)||^2 + sum_cells h ||dy/h||^2 w(x_mid)
double filipovic_norm(const ShiftState& s, const ShiftGrid& g);
double filipovic_norm(const ShiftState& s, const ShiftGrid& g, const WeightParams& w);

// S(steps*h): exact index shift, clamped to tail beyond x_max.
ShiftState shift_state(const ShiftState& s, const ShiftGrid& g, std::size_t steps);

struct Xi0Result {
    std::vector<double> value;       // values at x = 0 (first grid point)
    std::vector<double> telescoped;  // y(1) - sum_{cells < 1} dy, equal to <= 8 ulp
};
Xi0Result xi0_project_full(const ShiftState& s, const ShiftGrid& g);
std::vector<double> xi0_project(const ShiftState& s, const ShiftGrid& g);

std::vector<double> xi_inf_project(const ShiftState& s);
ShiftState s_infinity(const ShiftState& s, const ShiftGrid& g);

struct BoundReport {
    double max_ratio = 0.0;
    double bound = 0.0;
    bool ok = false;
    int trials = 0;
};

// ||S(t) - S_inf||_{delta -> delta'} <= max{1, (delta'-1)^{-1/2}} (1 v t)^{-(delta-delta')/2},
// 1 < delta' < delta; t is rounded to the nearest grid multiple.
BoundReport shift_ergodicity_check(const ShiftGrid& g, double delta_prime, double t, int trials,
                                   unsigned long long seed = 0x5eed0003ull);

}  // namespace voltlift::shift_lift
