#pragma once

#include <string>
#include <vector>

#include "voltlift/kernels.hpp"
#include "voltlift/resolvent.hpp"

// Evaluation of the theorem hypotheses as checkable inequalities: the
// moment / contraction smallness conditions, the K0/K1 constants of both
// lift theorems, the ergodicity rate lambda, the Wasserstein contraction
// rate chi, the LLN rate theta, and CLT admissibility.  Strict inequalities
// are reported with margins, never as bare booleans.

namespace voltlift::conditions {

struct ConditionReport {
    double p_exp = 0.0;
    double eps0 = 0.0, eps1 = 0.0;
    double delta = 0.0, delta_star_lo = 0.0, delta_star_hi = 0.0, eta = 0.0;
    double rho_exp = 0.0;     // semigroup regularisation exponent
    double lambda = 0.0;      // ergodicity rate
    double K0 = 0.0, K1 = 0.0;
    double lhs_moment = 0.0, lhs_contraction = 0.0;
    bool pass_moment = false, pass_contraction = false;
    double chi = 0.0;
    double lln_rate = 0.0;    // theta
    bool lln_log_factor = false;
    bool clt_ok = false;
    double gamma_holder = 1.0;
    double q_exp = 0.0, q_prime = 0.0;  // Schatten indices, 1/q + 1/q' = 1/2
    std::string notes;

    std::string to_json() const;
};

struct SmallnessInputs {
    double p_exp = 3.0;
    double xi_norm_V = 1.0;    // ||Xi||_{L(V,V)}
    double xi_norm_V0 = 1.0;   // ||Xi||_{L(V0,V)}
    double b_lip = 0.0, b_lin = 0.0;
    double sigma_lip = 0.0, sigma_lin = 0.0;
    double s_xi_b_l1_V = 0.0;       // int ||S(t) xi_b||_V dt
    double s_xi_sigma_l2_V = 0.0;   // (int ||S(t) xi_sigma||_V^2 dt)^{1/2}
    double s_xi_sigma_l2_V0 = 0.0;  // same on V0 (b=0 contraction display)
};

struct SmallnessResult {
    double lhs_moment = 0.0;
    double lhs_contraction = 0.0;
    bool pass_moment = false;
    bool pass_contraction = false;
    double margin_moment = 0.0;       // 1 - lhs
    double margin_contraction = 0.0;
};

SmallnessResult check_smallness(resolvent::RhoKind kind, const SmallnessInputs& in);

struct ConstantsResult {
    double K0 = 0.0;
    double K1 = 0.0;
    bool in_range = true;      // parameter ranges of the theorem
    std::string range_note;
    double quad_error = 0.0;   // K0 quadrature refinement estimate (shift lift)
};

// Laplace-lift constants:
//   K0 = (1/(2a - 2b 1_{a!=b} - 2e1) + 1/(2b - 1 - 2e0))^{1/2}
//   K1 = 2/(pi sin(a pi)) (theta1^{-2} e1^{-1/2} + e0^{-1/2}) (1 + 2/e1) ((2+e1)/(2e))^{2+e1}
ConstantsResult laplace_constants(double alpha, double beta, double eps0, double eps1,
                                  double theta1, double p_exp = 6.0, bool b_zero = false);

// Shift-lift constants:
//   K0 = (|e(1;a,b)|^2 + int |x^{b-2} E_{a,b-1}(-x^a)|^2 w_{3-2(b-a)-e1, 1-e0}(x) dx)^{1/2}
//        * (sum theta_n^{-2 gamma + 2(e0-b)/a})^{1/2}
//   K1 = (3 + 1/(2 - 2(b-a) - e1))^{1/2}
// The density integral runs over a declared window [x_lo, x_hi] on a
// geometric grid refined until stable; the small-x integrand exponent is
// reported since the theorem-display weight makes it cutoff-dominated for
// beta < 1 + e0/2.
struct ShiftK0Window {
    double x_lo = 1e-6;
    double x_hi = 1e4;
    int levels = 12;  // refinement doublings, starting from 256 cells
};

ConstantsResult shift_constants(double alpha, double beta, double eps0, double eps1,
                                double gamma_exp, const std::vector<double>& thetas,
                                const ShiftK0Window& win = {});

// Mode sum sum_n theta_n^{exponent} with divergence diagnostics.
struct ModeSum {
    double value = 0.0;
    bool divergent = false;
    double growth = 0.0;  // last partial-sum relative increment
};
ModeSum mode_sum(const std::vector<double>& thetas, double exponent);

struct RatesResult {
    double chi = 0.0;
    double lln_rate = 0.0;
    bool lln_log_factor = false;
    bool clt_ok = false;
    double clt_rate_lhs = 0.0;   // the case-table rate condition value
    double clt_l1_bound = 0.0;   // the e^{-...} bound on ||rho||_1
};

// chi from the case table, lln_rate = min{1, chi gamma}, CLT per case:
//   gen: lambda gamma / sqrt(p) > 1  and ||rho^(sqrt p)||_1 < e^{-sqrt(p)/gamma}
//   b0:  2 lambda gamma / sqrt(p) > 1 and same L1 bound
//   add: lambda gamma > 1           and ||rho_add||_1 < e^{-1/gamma}
RatesResult rates(resolvent::RhoKind kind, double lambda, double gamma_holder, double p_exp,
                  double l1_rho);

// Specialised LLN rates emitted by the two lift theorems.
double trace_class_lln_rate(double alpha, double beta, bool b_zero, double b_lip, double K0,
                            double K1);
double frac_hjm_lln_rate(double p_exp, double l1_rho_b0, double beta_minus_alpha, double eps1);

// Explicit bound evaluators for the fractional density integrals
// (operator norm and Hilbert-Schmidt); check_* returns (bound, direct
// numerical integral), bound must dominate.
struct BoundVsIntegral {
    double bound = 0.0;
    double integral = 0.0;
    bool ok = false;
};
BoundVsIntegral cm_density_opnorm_bound(double alpha, double beta, double delta_star,
                                        double eta_star, const std::vector<double>& thetas);
BoundVsIntegral cm_density_hs_bound(double alpha, double beta, double delta_star, double eta_star,
                                    double gamma_minus_kappa, const std::vector<double>& thetas);

}  // namespace voltlift::conditions
