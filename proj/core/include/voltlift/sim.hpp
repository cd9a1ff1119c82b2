#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "voltlift/kernels.hpp"
#include "voltlift/laplace_lift.hpp"
#include "voltlift/rng.hpp"
#include "voltlift/shift_lift.hpp"

// Path generation: a direct discrete-convolution oracle for the mild
// Volterra equation and lifted exponential-Euler / shift-Euler schemes over
// finite-mode diagonal models with additive or diagonal-affine noise.

namespace voltlift::sim {

enum class DriftKind { zero, affine, tanh_scaled };

struct DriftSpec {
    DriftKind kind = DriftKind::zero;
    std::vector<double> B;   // N x N row-major (affine)
    std::vector<double> b0;  // affine offset
    std::vector<double> c;   // per-mode tanh scale: b(u)_n = c_n tanh(u_n)

    double lipschitz(std::size_t n_modes) const;
    double linear_growth(std::size_t n_modes) const;
    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    bool is_zero() const { return kind == DriftKind::zero; }
};

enum class DiffusionKind { additive, affine };

struct DiffusionSpec {
    DiffusionKind kind = DiffusionKind::additive;
    std::vector<double> s0;  // additive level / affine offset
    std::vector<double> s1;  // affine slope, sigma(u)_n = s0_n + s1_n u_n

    double lipschitz_hs() const;  // q' = 2 convention
    double lipschitz_tr() const;  // q' = 1 convention
    double linear_growth() const;
    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    bool is_additive() const { return kind == DiffusionKind::additive; }
};

enum class ForcingKind { zero, constant, lift_state };

struct ForcingSpec {
    ForcingKind kind = ForcingKind::zero;
    std::vector<double> value;             // constant
    laplace_lift::LiftState lift_state;    // initial lifted state (laplace scheme)
    shift_lift::ShiftState shift_state;    // initial curve (shift scheme)
};

struct ModelSpec {
    kernels::SpectralOperator spectral;
    kernels::KernelSpec kernel_b;
    kernels::KernelSpec kernel_sigma;
    DriftSpec drift;
    DiffusionSpec diffusion;
    ForcingSpec forcing;

    std::size_t modes() const { return spectral.modes(); }
    void validate() const;
};

// Kernel spec with the per-mode eigenvalue theta_n substituted (the diagonal
// assumption makes all per-mode operations scalar).
kernels::KernelSpec with_theta(const kernels::KernelSpec& k, double theta);

enum class Scheme { direct, laplace_lift, shift_lift };

struct SimConfig {
    double dt = 1e-3;
    double T = 1.0;
    int paths = 1;
    std::uint64_t seed = 1;
    Scheme scheme = Scheme::direct;
    double burn_in = 0.0;
    int threads = 0;  // 0 = hardware concurrency

    std::size_t steps() const;
    void validate() const;
};

// observer(step k, u at t_k); k runs 1..steps, u has one entry per mode.
using PathObserver = std::function<void(std::size_t, const std::vector<double>&)>;

// Direct left-point Euler convolution with exact drift-step weights and
// variance-exact (L2 step norm) noise weights; O(steps^2) per path.
class DirectSimulator {
  public:
    DirectSimulator(const ModelSpec& m, const SimConfig& c);
    void run_path(std::uint64_t path_index, const PathObserver& obs) const;
    const std::vector<double>& drift_weights(std::size_t mode) const;   // w_b(m), m = 1..steps
    const std::vector<double>& noise_weights(std::size_t mode) const;   // w_sigma(m)

  private:
    const ModelSpec& model_;
    SimConfig cfg_;
    std::vector<std::vector<double>> wb_, ws_;  // per mode
    std::vector<double> forcing_g_;             // G(t_k) per step per mode
};

// Exponential Euler on the quadrature nodes.  Per step and node:
//   X' = e^{-x dt} X + phi1(x) xi_b(x) b(u) + g(x) xi_s(x) sigma(u) dW,
// phi1(x) = (1 - e^{-x dt})/x and g(x) = sqrt((1 - e^{-2 x dt})/(2 x dt)),
// the L1 / L2 averages of e^{-x s} over a step (both reduce to the
// midpoint factor e^{-x dt/2} up to O(dt^2)).
class LaplaceLiftSimulator {
  public:
    LaplaceLiftSimulator(const ModelSpec& m, const laplace_lift::QuadratureRule& q,
                         const SimConfig& c);
    void run_path(std::uint64_t path_index, const PathObserver& obs) const;
    // final lifted state of the last run_path call is intentionally not
    // retained; use run_path_state for the (lift path, u path) variant
    laplace_lift::LiftState run_path_state(std::uint64_t path_index,
                                           const PathObserver& obs) const;

  private:
    const ModelSpec& model_;
    laplace_lift::QuadratureRule rule_;
    SimConfig cfg_;
    std::vector<double> x_, w_, decay_, phi1_, gnoise_;
    std::vector<double> xi_b_, xi_s_;  // per node (mode-independent part)
    bool has_drift_kernel_ = false;
    std::vector<double> atom_;  // forcing atom values per mode
};

// Shift-Euler on the uniform grid: exact index shift plus kernel-embedded
// increments; node j receives int_{x_j}^{x_j+dt} E(s) ds (drift) and the
// same L1 step average for noise.  u_k = Xi_0 X_k = X_k(0).
class ShiftLiftSimulator {
  public:
    ShiftLiftSimulator(const ModelSpec& m, const shift_lift::ShiftGrid& g, const SimConfig& c);
    void run_path(std::uint64_t path_index, const PathObserver& obs) const;
    shift_lift::ShiftState run_path_state(std::uint64_t path_index,
                                          const PathObserver& obs) const;

  private:
    const ModelSpec& model_;
    shift_lift::ShiftGrid grid_;
    SimConfig cfg_;
    std::size_t shift_per_step_ = 1;
    std::vector<std::vector<double>> inc_b_, inc_s_;  // per mode, per node
};

// Dense output of one of the schemes: u[path][step][mode] flattened, plus
// the time grid.  Memory-heavy; meant for CLI dumps and small tests.
struct PathArray {
    std::size_t paths = 0, steps = 0, modes = 0;
    std::vector<double> t;
    std::vector<double> u;  // path-major, then step, then mode
    double value(std::size_t p, std::size_t k, std::size_t m) const {
        return u[(p * steps + k) * modes + m];
    }
};

PathArray simulate(const ModelSpec& m, const SimConfig& c,
                   const laplace_lift::QuadratureRule* rule = nullptr,
                   const shift_lift::ShiftGrid* grid = nullptr);

// Parallel map over paths with a fixed-order reduction: fn(path) runs on a
// pool, results are consumed in path order so aggregation is deterministic.
void run_paths(int n_paths, int threads, const std::function<void(int)>& fn);

}  // namespace voltlift::sim
