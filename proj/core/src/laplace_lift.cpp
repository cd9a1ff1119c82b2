#include "voltlift/laplace_lift.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace voltlift::laplace_lift {

using special::weight_value;

void QuadratureRule::validate() const {
    if (nodes.empty()) throw std::invalid_argument("QuadratureRule: empty rule");
    if (weights.size() != nodes.size())
        throw std::invalid_argument("QuadratureRule: node/weight size mismatch");
    double prev = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > prev)) throw std::invalid_argument("QuadratureRule: nodes must increase");
        if (!(weights[i] > 0.0)) throw std::invalid_argument("QuadratureRule: weights must be > 0");
        prev = nodes[i];
    }
    if (atom_mass < 0.0) throw std::invalid_argument("QuadratureRule: atom_mass < 0");
}

QuadratureRule build_quadrature(const WeightParams& wp, double x_min, double x_max, int K) {
    if (!(x_min > 0.0) || !(x_max > x_min))
        throw std::invalid_argument("build_quadrature: need 0 < x_min < x_max");
    if (K < 2) throw std::invalid_argument("build_quadrature: need K >= 2");
    wp.validate();

    QuadratureRule q;
    q.wparams = wp;
    q.atom_mass = wp.atom_mass;
    q.x_min = x_min;
    q.geometric = true;
    q.nodes.resize(K);
    q.weights.resize(K);
    const double h = std::log(x_max / x_min) / (K - 1);
    for (int i = 0; i < K; ++i) {
        const double x = x_min * std::exp(h * i);
        q.nodes[i] = x;
        q.weights[i] = h * x;
    }
    // end cells clipped to the window
    q.weights.front() = x_min * (std::exp(h / 2) - 1.0);
    q.weights.back() = x_max * (1.0 - std::exp(-h / 2));
    q.validate();
    return q;
}

QuadratureRule discrete_quadrature(std::vector<double> nodes, std::vector<double> weights,
                                   const WeightParams& wp) {
    QuadratureRule q;
    q.nodes = std::move(nodes);
    q.weights = std::move(weights);
    q.wparams = wp;
    q.atom_mass = wp.atom_mass;
    q.x_min = 0.0;
    q.geometric = false;
    q.validate();
    return q;
}

LiftState apply_semigroup(const LiftState& s, const QuadratureRule& q, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("apply_semigroup: t < 0");
    if (s.n_nodes() != q.size()) throw std::invalid_argument("apply_semigroup: state/rule mismatch");
    LiftState out = s;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double d = std::exp(-q.nodes[i] * t);
        for (std::size_t m = 0; m < s.n_modes; ++m) out.at(i, m) *= d;
    }
    return out;  // atom untouched: x = 0
}

std::vector<double> project(const LiftState& s, const QuadratureRule& q) {
    if (s.n_nodes() != q.size()) throw std::invalid_argument("project: state/rule mismatch");
    std::vector<double> out(s.n_modes, 0.0);
    for (std::size_t m = 0; m < s.n_modes; ++m) out[m] = q.atom_mass * s.atom[m];
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t m = 0; m < s.n_modes; ++m) out[m] += q.weights[i] * s.at(i, m);
    return out;
}

LiftState s_infinity(const LiftState& s, const QuadratureRule& q) {
    LiftState out(s.n_nodes(), s.n_modes);
    if (q.atom_mass > 0.0) out.atom = s.atom;
    return out;
}

double lift_norm(const LiftState& s, const QuadratureRule& q, const WeightParams& w) {
    if (s.n_nodes() != q.size()) throw std::invalid_argument("lift_norm: state/rule mismatch");
    double acc = 0.0;
    for (std::size_t m = 0; m < s.n_modes; ++m) acc += q.atom_mass * s.atom[m] * s.atom[m];
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double wx = weight_value(w, q.nodes[i]);
        double sq = 0.0;
        for (std::size_t m = 0; m < s.n_modes; ++m) sq += s.at(i, m) * s.at(i, m);
        acc += q.weights[i] * sq * wx;
    }
    return std::sqrt(acc);
}

EmbeddedKernel embed_kernel(const kernels::KernelSpec& k, const QuadratureRule& q) {
    // discrete rules carry the kernel's own Bernstein mass in their weights,
    // so the continuum density regime is not required there
    k.validate(q.geometric);
    EmbeddedKernel e;
    e.offset = kernels::support_offset(k);
    e.x_min = q.x_min;
    e.x.resize(q.size());
    e.xi.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        e.x[i] = q.nodes[i] + e.offset;
        e.xi[i] = q.geometric ? kernels::bernstein_density(k, q.nodes[i]) : 1.0;
    }
    if (q.geometric && q.x_min > 0.0) e.head = kernels::density_small_x_expansion(k);
    return e;
}

ReconstructResult reconstruct_kernel_full(const kernels::KernelSpec& k, const QuadratureRule& q,
                                          double t) {
    if (!(t > 0.0)) throw std::invalid_argument("reconstruct_kernel: needs t > 0");
    if (q.nodes.empty()) throw std::invalid_argument("reconstruct_kernel: empty quadrature");
    const EmbeddedKernel e = embed_kernel(k, q);

    ReconstructResult r;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        acc += q.weights[i] * std::exp(-e.x[i] * t) * e.xi[i];

    // head cell [0, x_min): expand e^{-xt} to second order against the
    // density's leading powers; remainder O((x_min t)^3) relative
    if (!e.head.empty()) {
        const double damp = std::exp(-e.offset * t);
        double head = 0.0;
        for (const auto& term : e.head) {
            const double p = term.power;
            head += term.coef * (std::pow(q.x_min, p + 1.0) / (p + 1.0) -
                                 t * std::pow(q.x_min, p + 2.0) / (p + 2.0) +
                                 0.5 * t * t * std::pow(q.x_min, p + 3.0) / (p + 3.0));
        }
        r.head = damp * head;
    }

    // tail beyond the last node: |xi| decays like a power, bound by the
    // last density value times the remaining exponential mass
    const double x_top = e.x.back();
    r.tail_bound = std::abs(e.xi.back()) * std::exp(-x_top * t) / t;

    r.value = acc + r.head;
    return r;
}

double reconstruct_kernel(const kernels::KernelSpec& k, const QuadratureRule& q, double t) {
    return reconstruct_kernel_full(k, q, t).value;
}

std::vector<double> g_from_state(const LiftState& s, const QuadratureRule& q, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("g_from_state: needs t > 0");
    return project(apply_semigroup(s, q, t), q);
}

double g_growth_bound(const LiftState& s, const QuadratureRule& q, const WeightParams& w,
                      double eta_star, double t) {
    // ||G(t)|| <= (1 + t^{-(eta* - eta)_+/2}) |||y|||_{delta,eta} * Xi-bound factor
    WeightParams wstar = w;
    wstar.eta = eta_star;
    double xi_sq = q.atom_mass;
    for (std::size_t i = 0; i < q.size(); ++i)
        xi_sq += q.weights[i] / weight_value(wstar, q.nodes[i]);
    const double gap = std::max(eta_star - w.eta, 0.0);
    return (1.0 + std::pow(t, -gap / 2.0)) * lift_norm(s, q, w) * std::sqrt(xi_sq);
}

namespace {

LiftState random_state(const QuadratureRule& q, std::mt19937_64& rng) {
    // scalar-mode states with mass spread over a random log-window; heavier
    // tails than iid values so the bounds get probed across scales
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    LiftState s(q.size(), 1);
    const std::size_t K = q.size();
    const std::size_t lo = static_cast<std::size_t>(unif(rng) * K * 0.9);
    const std::size_t hi = std::min<std::size_t>(K, lo + 1 + static_cast<std::size_t>(unif(rng) * (K - lo)));
    for (std::size_t i = lo; i < hi; ++i) s.at(i, 0) = gauss(rng);
    s.atom[0] = q.atom_mass > 0.0 ? gauss(rng) : 0.0;
    return s;
}

}  // namespace

BoundReport semigroup_bound_check(const QuadratureRule& q, const WeightParams& w_from,
                                  const WeightParams& w_to, double t, int trials,
                                  unsigned long long seed) {
    if (!(w_to.eta > w_from.eta))
        throw std::invalid_argument("semigroup_bound_check: needs eta_to > eta_from");
    if (!(t > 0.0)) throw std::invalid_argument("semigroup_bound_check: needs t > 0");
    const double rho = w_to.eta - w_from.eta;
    BoundReport rep;
    rep.trials = trials;
    rep.bound = std::sqrt(std::max({q.atom_mass, 1.0, special::elementary_bound_constant(rho)})) *
                (1.0 + std::pow(t, -rho / 2.0));
    std::mt19937_64 rng(seed);
    for (int i = 0; i < trials; ++i) {
        LiftState y = random_state(q, rng);
        const double denom = lift_norm(y, q, w_from);
        if (denom == 0.0) continue;
        const double num = lift_norm(apply_semigroup(y, q, t), q, w_to);
        rep.max_ratio = std::max(rep.max_ratio, num / denom);
    }
    rep.ok = rep.max_ratio <= rep.bound;
    return rep;
}

BoundReport ergodicity_bound_check(const QuadratureRule& q, const WeightParams& w_from,
                                   const WeightParams& w_to, double t, int trials,
                                   unsigned long long seed) {
    if (!(w_to.delta < w_from.delta))
        throw std::invalid_argument("ergodicity_bound_check: needs delta_to < delta_from");
    if (!(t > 0.0)) throw std::invalid_argument("ergodicity_bound_check: needs t > 0");
    const double gap = w_from.delta - w_to.delta;
    BoundReport rep;
    rep.trials = trials;
    rep.bound = std::sqrt(std::max(1.0, special::elementary_bound_constant(gap))) *
                std::pow(std::max(1.0, t), -gap / 2.0);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < trials; ++i) {
        LiftState y = random_state(q, rng);
        const double denom = lift_norm(y, q, w_from);
        if (denom == 0.0) continue;
        LiftState diff = apply_semigroup(y, q, t);
        LiftState sinf = s_infinity(y, q);
        for (std::size_t m = 0; m < diff.n_modes; ++m) diff.atom[m] -= sinf.atom[m];
        const double num = lift_norm(diff, q, w_to);
        rep.max_ratio = std::max(rep.max_ratio, num / denom);
    }
    rep.ok = rep.max_ratio <= rep.bound;
    return rep;
}

double regularization_profile(const QuadratureRule& q, const WeightParams& w_from,
                              const WeightParams& w_to, double t) {
    // single-node states: ratio = e^{-xt} sqrt(w_to(x)/w_from(x)); the max
    // over nodes tracks the t^{-(eta_to-eta_from)/2} envelope
    double best = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double x = q.nodes[i];
        const double r = std::exp(-x * t) *
                         std::sqrt(weight_value(w_to, x) / weight_value(w_from, x));
        best = std::max(best, r);
    }
    return best;
}

}  // namespace voltlift::laplace_lift
