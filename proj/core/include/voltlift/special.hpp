#pragma once

#include <cstddef>

// Special functions used throughout: Gamma, the two-parameter
// Mittag-Leffler function E_{alpha,beta}, the BDG moment constant c_p,
// the elementary-inequality constant C(rho), and the two weight-function
// families of the lifted state spaces.

namespace voltlift::special {

struct MLParams {
    double alpha = 1.0;  // in (0,2)
    double beta = 1.0;

    void validate() const;
};

enum class WeightFamily { laplace, shift };

struct WeightParams {
    double delta = 0.0;
    double eta = 0.0;
    WeightFamily family = WeightFamily::laplace;
    double atom_mass = 0.0;  // mu({0}), laplace family only

    void validate() const;
};

// Declared tolerances; kept in one place instead of scattered literals.
struct Tolerances {
    static constexpr double gamma_rel = 1e-13;       // Lanczos target on (0,170)
    static constexpr double ml_branch_match = 1e-8;  // branch agreement at the switch points
    static constexpr double ml_series_eps = 1e-17;   // series term cutoff (relative)
    static constexpr double ml_far_switch = 25.0;    // integral -> Poincare switch (alpha < 1)
};

double gamma_fn(double x);
double log_gamma(double x);  // x > 0
// 1/Gamma(x); zero at the poles x = 0, -1, -2, ...
double inv_gamma(double x);

// E_{alpha,beta}(z) for real z.  Power series with long-double accumulation
// for |z| <= z_crossover(alpha), Poincare asymptotic expansion for large
// negative z.  Closed forms for alpha in {1,2} with beta in {1,2}.
double mittag_leffler(const MLParams& p, double z);

// Series/asymptotics switch point; calibrated so both branches agree to
// Tolerances::ml_branch_match for alpha in [0.5, 1.5] (see unit tests).
double ml_crossover(double alpha);

// e(t) = t^{beta-1} E_{alpha,beta}(-theta t^alpha), the scalar resolvent kernel.
double ml_kernel_value(const MLParams& p, double theta, double t);

// int_0^t s^{beta-1} E_{alpha,beta}(-theta s^alpha) ds = t^beta E_{alpha,beta+1}(-theta t^alpha)
double ml_step_integral(const MLParams& p, double theta, double t);

// BDG constant: c_2 = 1, c_p = (p(p-1)/2)^p (p/(p-1))^{p^2/2} for p > 2.
double bdg_constant(double p_exp);

// C(rho) = 2^{-rho} rho^rho e^{-rho}; satisfies x^rho e^{-2xt} <= C(rho) t^{-rho}.
double elementary_bound_constant(double rho_exp);

// Weight functions.
//   laplace: 1_{x=0} + 1_{0<x<=1} x^{-delta} + 1_{x>1} x^{eta}
//   shift:   1_{0<x<=1} x^{eta} + 1_{x>1} x^{delta}
double weight_value(const WeightParams& w, double x);

}  // namespace voltlift::special
