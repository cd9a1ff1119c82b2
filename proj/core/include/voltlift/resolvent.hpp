#pragma once

#include <cstddef>
#include <functional>
#include <vector>

// Discrete linear Volterra machinery: the resolvent equation
// r = rho + rho * r, the contraction kernels rho_gen / rho_{b=0} / rho_add
// assembled from lift norms, the decay-rate functions R, and the tail
// estimates used to certify them.

namespace voltlift::resolvent {

// Nonnegative kernel sampled at midpoints t_k = (k + 1/2) dt.
struct SampledKernel {
    double dt = 0.0;
    std::vector<double> samples;

    SampledKernel() = default;
    SampledKernel(double step, std::vector<double> values);
    static SampledKernel from_function(const std::function<double(double)>& f, double dt,
                                       std::size_t n);

    double l1() const;                 // dt * sum(samples)
    double horizon() const;            // n * dt
    double tail_integral(double T) const;  // dt * sum over t_k >= T
    void validate() const;
};

// Forward midpoint solve of r = rho + rho * r; requires ||rho||_1 < 1
// (Paley-Wiener).
SampledKernel solve_resolvent(const SampledKernel& rho);

// Default sampling horizon for a kernel with L1 mass l1: long enough that
// the Appendix-style tail checks see negligible truncation.
double default_horizon(double l1);

// R(t) = (1 v t)^{-lambda p} + int_0^t r(t-s) (1 v s)^{-lambda p} ds.
double rate_function(const SampledKernel& r, double lambda, double p_exp, double t);

enum class RhoKind { gen, b0, add };

// Everything the rho displays consume.  Curves are ||S(t) xi||-type norms
// sampled on the same midpoint grid (V0-norms for the contraction kernels).
struct RhoInputs {
    double p_exp = 2.0;
    double xi_norm = 1.0;       // ||Xi||_{L(V0,V)}
    double b_lip = 0.0;
    double sigma_lip = 0.0;
    SampledKernel s_xi_b;       // ||S(t) xi_b||
    SampledKernel s_xi_sigma;   // ||S(t) xi_sigma||
};

SampledKernel build_rho(RhoKind kind, const RhoInputs& in);

struct TailCheckReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // declared discretisation slack
    bool ok = false;
};

// int_T^inf (f*g) <= 2 ||f||_1 int_{lam T}^inf g + ||g||_1 int_{(1-lam)T}^inf f
TailCheckReport tail_convolution_check(const SampledKernel& f, const SampledKernel& g, double T,
                                       double lam);

// int_T^inf r <= ||r||_1 T^{-log(1/||rho||_1)}
//              + (1 + 2||r||_1)/(1 - ||rho||_1) int_{kap T^{1+log(1-kap)}}^inf rho
TailCheckReport resolvent_tail_check(const SampledKernel& rho, double T, double kappa);

// Least-squares log-log slope of R(t) on [t_lo, t_hi]; the decay-shape check
// asserts slope <= -min{lambda p, log(1/||rho||_1)} + 0.1 on suitable kernels.
double rate_decay_slope(const SampledKernel& r, const SampledKernel& rho, double lambda,
                        double p_exp, double t_lo, double t_hi);

}  // namespace voltlift::resolvent
