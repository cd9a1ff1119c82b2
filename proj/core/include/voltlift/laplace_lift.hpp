#pragma once

#include <cstddef>
#include <vector>

#include "voltlift/kernels.hpp"
#include "voltlift/special.hpp"

// Discretised Laplace-transform lift: the weighted density space as
// node vectors under a quadrature rule for mu(dx) = m0 delta_0 + dx,
// the multiplication semigroup S(t)y(x) = e^{-xt} y(x), the projection
// Xi y = integral of y, the long-time limit S_inf, and the norm/ergodicity
// bounds that come with them.

namespace voltlift::laplace_lift {

using special::WeightParams;

struct QuadratureRule {
    double atom_mass = 0.0;
    std::vector<double> nodes;    // strictly increasing, positive
    std::vector<double> weights;  // positive
    WeightParams wparams;         // laplace family
    double x_min = 0.0;           // head cell [0, x_min) integrated analytically
    bool geometric = false;

    std::size_t size() const { return nodes.size(); }
    void validate() const;
};

// Geometric grid x_i = x_min r^i with log-midpoint weights h x_i (end cells
// clipped to the window, so the weights tile [x_min, x_max] exactly up to
// the O(h^2) sinh correction).
QuadratureRule build_quadrature(const WeightParams& wp, double x_min, double x_max, int K);

// Explicit node/weight list for discrete Bernstein measures (e.g. the
// single-node exponential-kernel embedding).
QuadratureRule discrete_quadrature(std::vector<double> nodes, std::vector<double> weights,
                                   const WeightParams& wp);

struct LiftState {
    std::size_t n_modes = 0;
    std::vector<double> atom;         // length n_modes
    std::vector<double> node_values;  // K x n_modes, node-major

    LiftState() = default;
    LiftState(std::size_t n_nodes, std::size_t modes)
        : n_modes(modes), atom(modes, 0.0), node_values(n_nodes * modes, 0.0) {}

    double& at(std::size_t node, std::size_t mode) { return node_values[node * n_modes + mode]; }
    double at(std::size_t node, std::size_t mode) const {
        return node_values[node * n_modes + mode];
    }
    std::size_t n_nodes() const { return n_modes == 0 ? 0 : node_values.size() / n_modes; }
};

LiftState apply_semigroup(const LiftState& s, const QuadratureRule& q, double t);
std::vector<double> project(const LiftState& s, const QuadratureRule& q);
LiftState s_infinity(const LiftState& s, const QuadratureRule& q);
double lift_norm(const LiftState& s, const QuadratureRule& q, const WeightParams& w);

// Kernel embedded on the rule: effective node positions (support offset of
// damped kernels applied) and density values; reconstruct_kernel sums
// w_i e^{-x_i t} xi_i plus the analytic head-cell integral.
struct EmbeddedKernel {
    std::vector<double> x;   // effective positions
    std::vector<double> xi;  // density values
    std::vector<kernels::PowerTerm> head;  // small-x expansion of the de-offset density
    double offset = 0.0;
    double x_min = 0.0;
};

EmbeddedKernel embed_kernel(const kernels::KernelSpec& k, const QuadratureRule& q);

struct ReconstructResult {
    double value = 0.0;       // quadrature + head
    double head = 0.0;        // analytic contribution of [0, x_min)
    double tail_bound = 0.0;  // bound on the truncated integral x > x_max
};

ReconstructResult reconstruct_kernel_full(const kernels::KernelSpec& k, const QuadratureRule& q,
                                          double t);
double reconstruct_kernel(const kernels::KernelSpec& k, const QuadratureRule& q, double t);

// G(t) = Xi S(t) y and the Lemma-style growth bound evaluator.
std::vector<double> g_from_state(const LiftState& s, const QuadratureRule& q, double t);
double g_growth_bound(const LiftState& s, const QuadratureRule& q, const WeightParams& w,
                      double eta_star, double t);

struct BoundReport {
    double max_ratio = 0.0;  // worst observed ||S(t)y|| ratio over the trial states
    double bound = 0.0;
    bool ok = false;
    int trials = 0;
};

// Regularisation bound ||S(t)||_{from -> to} for eta_to > eta_from:
//   max{mu({0}), 1, C(eta_to - eta_from)}^{1/2} (1 + t^{-(eta_to-eta_from)/2}).
BoundReport semigroup_bound_check(const QuadratureRule& q, const WeightParams& w_from,
                                  const WeightParams& w_to, double t, int trials,
                                  unsigned long long seed = 0x5eed0001ull);

// Ergodicity bound ||S(t) - S_inf||_{delta -> delta'} for delta' < delta:
//   max{1, C(delta - delta')}^{1/2} (1 v t)^{-(delta-delta')/2}.
BoundReport ergodicity_bound_check(const QuadratureRule& q, const WeightParams& w_from,
                                   const WeightParams& w_to, double t, int trials,
                                   unsigned long long seed = 0x5eed0002ull);

// Realised sup-ratio over single-node states at time t (the profile whose
// log-log slope in t exhibits the t^{-(eta-eta')/2} regularisation rate).
double regularization_profile(const QuadratureRule& q, const WeightParams& w_from,
                              const WeightParams& w_to, double t);

}  // namespace voltlift::laplace_lift
