#pragma once

#include <memory>
#include <vector>

#include "voltlift/special.hpp"

// Catalog of Volterra kernels with completely monotone representations
// E(t) = int_0^inf e^{-xt} xi(x) dx: the fractional Riemann-Liouville
// kernel, the log-kernel, the fractional resolvent kernels
// e(t) = t^{beta-1} E_{alpha,beta}(-theta t^alpha), and damped / shifted
// variants of any of them.

namespace voltlift::kernels {

enum class KernelKind {
    fractional_rl,         // t^{alpha-1}/Gamma(alpha), alpha in (0,1)
    log_kernel,            // log(1 + 1/t)
    resolvent_fractional,  // t^{beta-1} E_{alpha,beta}(-theta t^alpha)
    damped,                // e^{-lambda t} * inner
    time_shifted,          // inner(t + epsilon)
};

struct KernelSpec {
    KernelKind kind = KernelKind::fractional_rl;
    double alpha = 0.5;
    double beta = 0.5;
    double theta = 1.0;      // resolvent kind
    double lambda = 0.0;     // damped kind
    double epsilon = 0.0;    // time_shifted kind
    std::shared_ptr<const KernelSpec> inner;  // damped / time_shifted

    // strict = true enforces the density-representation regime
    // (alpha in (0,1), beta in (0, alpha+1)); the shift lift admits the
    // wider alpha in (0,2) range checked by validate(false).
    void validate(bool strict = true) const;

    static KernelSpec fractional_rl(double alpha);
    static KernelSpec log_kernel();
    static KernelSpec resolvent_fractional(double alpha, double beta, double theta);
    static KernelSpec damped(KernelSpec inner, double lambda);
    static KernelSpec time_shifted(KernelSpec inner, double epsilon);
};

// Closed-form kernel value at t > 0.
double kernel_value(const KernelSpec& k, double t);

// Bernstein density xi(x) of the kernel, x > 0 measured from the support
// offset (damped kernels shift the density by lambda; callers work on the
// offset grid, see support_offset).  Damped kinds return 0 for x <= lambda
// when evaluated in absolute coordinates via bernstein_density_abs.
double bernstein_density(const KernelSpec& k, double x);
double bernstein_density_abs(const KernelSpec& k, double x_absolute);

// Total shift of the density support: sum of lambdas along damped wrappers.
double support_offset(const KernelSpec& k);

// Leading small-x expansion xi(x) ~ sum_j c_j x^{p_j} of the de-offset
// density; used to integrate the head cell [0, x_min) exactly.
struct PowerTerm {
    double coef;
    double power;  // > -1
};
std::vector<PowerTerm> density_small_x_expansion(const KernelSpec& k);

// x-derivative of the resolvent kernel t -> e(t): e'(x) = x^{beta-2} E_{alpha,beta-1}(-theta x^alpha).
double shift_derivative_density(const KernelSpec& k, double x);

struct SpectralOperator {
    std::vector<double> thetas;      // strictly increasing, positive
    std::vector<double> noise_eigs;  // lambda_n >= 0
    double gamma_exp = 0.0;          // set when noise_eigs = thetas^{-gamma}

    std::size_t modes() const { return thetas.size(); }
    void validate() const;
};

// Weyl asymptotics theta_n = c n^{2/d} for the Dirichlet Laplacian on a
// d-dimensional domain; noise_eigs defaults to lambda_n = theta_n^{-gamma}.
SpectralOperator weyl_eigenvalues(int dim, double c, int n_modes, double gamma_exp = 0.0);

}  // namespace voltlift::kernels
