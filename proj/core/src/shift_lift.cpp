#include "voltlift/shift_lift.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace voltlift::shift_lift {

using special::weight_value;

namespace {
bool near_integer(double v, double tol = 1e-9) { return std::abs(v - std::round(v)) < tol; }
}  // namespace

std::size_t ShiftGrid::points() const {
    return static_cast<std::size_t>(std::llround(x_max / h)) + 1;
}

void ShiftGrid::validate() const {
    if (!(h > 0.0) || !(x_max > 0.0)) throw std::invalid_argument("ShiftGrid: h, x_max must be > 0");
    if (!near_integer(x_max / h) || std::llround(x_max / h) < 2)
        throw std::invalid_argument("ShiftGrid: x_max/h must be an integer >= 2");
    if (!near_integer(1.0 / h))
        throw std::invalid_argument("ShiftGrid: 1/h must be an integer so that x = 1 is a grid point");
    if (wparams.family != special::WeightFamily::shift)
        throw std::invalid_argument("ShiftGrid: weight family must be shift");
    wparams.validate();
}

double filipovic_norm(const ShiftState& s, const ShiftGrid& g) {
    return filipovic_norm(s, g, g.wparams);
}

double filipovic_norm(const ShiftState& s, const ShiftGrid& g, const WeightParams& w) {
    g.validate();
    const std::size_t J = s.n_points() - 1;
    if (s.n_points() != g.points()) throw std::invalid_argument("filipovic_norm: state/grid mismatch");
    const std::size_t j1 = static_cast<std::size_t>(std::llround(1.0 / g.h));

    double acc = 0.0;
    for (std::size_t m = 0; m < s.n_modes; ++m) acc += s.at(j1, m) * s.at(j1, m);
    for (std::size_t j = 0; j < J; ++j) {
        const double xm = (static_cast<double>(j) + 0.5) * g.h;
        const double wx = weight_value(w, xm);
        double sq = 0.0;
        for (std::size_t m = 0; m < s.n_modes; ++m) {
            const double d = (s.at(j + 1, m) - s.at(j, m)) / g.h;
            sq += d * d;
        }
        acc += g.h * sq * wx;
    }
    return std::sqrt(acc);
}

ShiftState shift_state(const ShiftState& s, const ShiftGrid& g, std::size_t steps) {
    const std::size_t n = s.n_points();
    if (n != g.points()) throw std::invalid_argument("shift_state: state/grid mismatch");
    ShiftState out(n, s.n_modes);
    out.tail = s.tail;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = j + steps;
        for (std::size_t m = 0; m < s.n_modes; ++m)
            out.at(j, m) = src < n ? s.at(src, m) : s.tail[m];
    }
    return out;
}

Xi0Result xi0_project_full(const ShiftState& s, const ShiftGrid& g) {
    g.validate();
    if (s.n_points() != g.points()) throw std::invalid_argument("xi0_project: state/grid mismatch");
    const std::size_t j1 = static_cast<std::size_t>(std::llround(1.0 / g.h));
    Xi0Result r;
    r.value.resize(s.n_modes);
    r.telescoped.resize(s.n_modes);
    for (std::size_t m = 0; m < s.n_modes; ++m) {
        r.value[m] = s.at(0, m);
        double acc = s.at(j1, m);
        for (std::size_t j = j1; j-- > 0;) acc -= (s.at(j + 1, m) - s.at(j, m));
        r.telescoped[m] = acc;
    }
    return r;
}

std::vector<double> xi0_project(const ShiftState& s, const ShiftGrid& g) {
    return xi0_project_full(s, g).value;
}

std::vector<double> xi_inf_project(const ShiftState& s) { return s.tail; }

ShiftState s_infinity(const ShiftState& s, const ShiftGrid& g) {
    ShiftState out(s.n_points(), s.n_modes);
    out.tail = s.tail;
    for (std::size_t j = 0; j < s.n_points(); ++j)
        for (std::size_t m = 0; m < s.n_modes; ++m) out.at(j, m) = s.tail[m];
    (void)g;
    return out;
}

BoundReport shift_ergodicity_check(const ShiftGrid& g, double delta_prime, double t, int trials,
                                   unsigned long long seed) {
    g.validate();
    const double delta = g.wparams.delta;
    if (!(delta_prime > 1.0 && delta_prime < delta))
        throw std::invalid_argument("shift_ergodicity_check: needs 1 < delta' < delta");
    if (!(t > 0.0)) throw std::invalid_argument("shift_ergodicity_check: needs t > 0");

    const std::size_t steps = static_cast<std::size_t>(std::llround(t / g.h));
    const double t_eff = static_cast<double>(steps) * g.h;

    WeightParams w_to = g.wparams;
    w_to.delta = delta_prime;

    BoundReport rep;
    rep.trials = trials;
    rep.bound = std::max(1.0, 1.0 / std::sqrt(delta_prime - 1.0)) *
                std::pow(std::max(1.0, t_eff), -(delta - delta_prime) / 2.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = g.points();
    for (int i = 0; i < trials; ++i) {
        // random piecewise-smooth curve with decaying increments so the
        // delta-weighted derivative norm stays moderate
        ShiftState y(n, 1);
        const double decay = 0.5 + 2.5 * unif(rng);
        double cur = gauss(rng);
        y.at(0, 0) = cur;
        for (std::size_t j = 1; j < n; ++j) {
            const double x = static_cast<double>(j) * g.h;
            cur += gauss(rng) * g.h * std::pow(1.0 + x, -decay);
            y.at(j, 0) = cur;
        }
        y.tail[0] = y.at(n - 1, 0);
        const double denom = filipovic_norm(y, g);
        if (denom == 0.0) continue;

        ShiftState diff = shift_state(y, g, steps);
        const ShiftState sinf = s_infinity(y, g);
        for (std::size_t j = 0; j < n; ++j) diff.at(j, 0) -= sinf.at(j, 0);
        diff.tail[0] -= sinf.tail[0];
        const double num = filipovic_norm(diff, g, w_to);
        rep.max_ratio = std::max(rep.max_ratio, num / denom);
    }
    rep.ok = rep.max_ratio <= rep.bound;
    return rep;
}

}  // namespace voltlift::shift_lift
