#include "voltlift/conditions.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "voltlift/special.hpp"

namespace voltlift::conditions {

namespace {
constexpr double kPi = 3.14159265358979323846;

using special::MLParams;

double sq(double x) { return x * x; }

// log-midpoint quadrature of f on [lo, hi] with n geometric cells
double log_midpoint(const std::function<double(double)>& f, double lo, double hi, int n) {
    const double h = std::log(hi / lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = lo * std::exp(h * (i + 0.5));
        acc += f(x) * x;
    }
    return acc * h;
}
}  // namespace

SmallnessResult check_smallness(resolvent::RhoKind kind, const SmallnessInputs& in) {
    const double p = in.p_exp;
    if (!(p > 2.0)) throw std::invalid_argument("check_smallness: needs p > 2");
    const double cp = special::bdg_constant(p);
    SmallnessResult r;
    switch (kind) {
        case resolvent::RhoKind::gen:
            r.lhs_moment = std::pow(6.0, p - 1.0) * std::pow(in.xi_norm_V, p) *
                           (std::pow(in.b_lin, p) * std::pow(in.s_xi_b_l1_V, p) +
                            cp * std::pow(in.sigma_lin, p) * std::pow(in.s_xi_sigma_l2_V, p));
            r.lhs_contraction = std::pow(3.0, p - 1.0) * std::pow(in.xi_norm_V0, p) *
                                (std::pow(in.b_lip, p) * std::pow(in.s_xi_b_l1_V, p) +
                                 cp * std::pow(in.sigma_lip, p) * std::pow(in.s_xi_sigma_l2_V, p));
            break;
        case resolvent::RhoKind::b0:
            r.lhs_moment = std::pow(4.0, 1.0 - 1.0 / p) * in.sigma_lin * in.xi_norm_V *
                           in.s_xi_sigma_l2_V * std::pow(cp, 1.0 / p);
            r.lhs_contraction = std::pow(2.0, 1.0 - 1.0 / p) * in.sigma_lip * in.xi_norm_V0 *
                                in.s_xi_sigma_l2_V0 * std::pow(cp, 1.0 / p);
            break;
        case resolvent::RhoKind::add:
            r.lhs_moment = std::max(in.b_lip * in.xi_norm_V0, in.b_lin * in.xi_norm_V) *
                           in.s_xi_b_l1_V;
            r.lhs_contraction = r.lhs_moment;
            break;
    }
    r.pass_moment = r.lhs_moment < 1.0;
    r.pass_contraction = r.lhs_contraction < 1.0;
    r.margin_moment = 1.0 - r.lhs_moment;
    r.margin_contraction = 1.0 - r.lhs_contraction;
    return r;
}

ConstantsResult laplace_constants(double alpha, double beta, double eps0, double eps1,
                                  double theta1, double p_exp, bool b_zero) {
    if (std::sin(alpha * kPi) == 0.0)
        throw std::invalid_argument("laplace_constants: sin(alpha pi) = 0");
    ConstantsResult r;
    std::ostringstream note;

    const double ind = (alpha != beta) ? 1.0 : 0.0;
    const double den0 = 2.0 * alpha - 2.0 * beta * ind - 2.0 * eps1;
    const double den1 = 2.0 * beta - 1.0 - 2.0 * eps0;
    if (den0 <= 0.0 || den1 <= 0.0) {
        r.in_range = false;
        note << "K0 denominator nonpositive (divergent); ";
        r.K0 = std::numeric_limits<double>::infinity();
    } else {
        r.K0 = std::sqrt(1.0 / den0 + 1.0 / den1);
    }
    r.K1 = 2.0 / (kPi * std::sin(alpha * kPi)) *
           (std::pow(theta1, -2.0) / std::sqrt(eps1) + 1.0 / std::sqrt(eps0)) *
           (1.0 + 2.0 / eps1) * std::pow((2.0 + eps1) / (2.0 * std::exp(1.0)), 2.0 + eps1);

    if (!(alpha > 0.5 && alpha < 1.0)) {
        r.in_range = false;
        note << "alpha outside (1/2,1); ";
    }
    if (!(beta > 0.5 && beta < 0.5 + alpha)) {
        r.in_range = false;
        note << "beta outside (1/2, 1/2+alpha); ";
    }
    if (!(eps0 > 2.0 / p_exp && eps0 < (2.0 * beta - 1.0) / 3.0)) {
        r.in_range = false;
        note << "eps0 outside (2/p, (2b-1)/3) (may be infeasible for this (p,beta)); ";
    }
    const double e1_hi = 2.0 / 3.0 * (alpha - beta * ind + (b_zero ? 0.5 : 0.0));
    if (!(eps1 > 0.0 && eps1 < e1_hi)) {
        r.in_range = false;
        note << "eps1 outside (0, 2/3 (a - b 1 + 1/2 1_{b=0})); ";
    }
    r.range_note = note.str();
    return r;
}

ModeSum mode_sum(const std::vector<double>& thetas, double exponent) {
    ModeSum m;
    double quarter = 0.0;
    const std::size_t n = thetas.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double term = std::pow(thetas[i], exponent);
        m.value += term;
        if (i >= 3 * n / 4) quarter += term;
    }
    m.growth = n >= 4 ? quarter / m.value : 0.0;
    // increasing terms, or a tail that still carries most of the mass
    m.divergent = (n >= 2 && std::pow(thetas[n - 1], exponent) >= std::pow(thetas[0], exponent) &&
                   exponent >= 0.0) ||
                  m.growth > 0.5;
    return m;
}

ConstantsResult shift_constants(double alpha, double beta, double eps0, double eps1,
                                double gamma_exp, const std::vector<double>& thetas,
                                const ShiftK0Window& win) {
    ConstantsResult r;
    std::ostringstream note;

    const double bma = beta - alpha;
    const double den = 2.0 - 2.0 * bma - eps1;
    if (den <= 0.0) throw std::invalid_argument("shift_constants: K1 denominator nonpositive");
    r.K1 = std::sqrt(3.0 + 1.0 / den);

    if (!(alpha > 0.0 && alpha < 2.0)) { r.in_range = false; note << "alpha outside (0,2); "; }
    if (!(beta > 0.5 && beta < 0.5 + alpha)) { r.in_range = false; note << "beta outside (1/2, 1/2+alpha); "; }
    if (!(eps0 > 0.0 && eps0 < 1.0)) { r.in_range = false; note << "eps0 outside (0,1); "; }
    if (!(eps1 > 0.0 && eps1 < (1.0 - 2.0 * bma) / 2.0)) {
        r.in_range = false;
        note << "eps1 outside (0, (1-2(b-a))/2); ";
    }

    // weight of the density integral, shift family with
    // delta* = 3 - 2(b-a) - eps1 and eta = 1 - eps0
    special::WeightParams w;
    w.family = special::WeightFamily::shift;
    w.delta = 3.0 - 2.0 * bma - eps1;
    w.eta = 1.0 - eps0;

    // small-x integrand exponent |x^{b-2} E_{a,b-1}|^2 x^eta ~ x^{2b-4+eta};
    // below -1 the integral is dominated by the window cutoff
    const double head_exp = 2.0 * beta - 4.0 + w.eta;
    if (head_exp <= -1.0)
        note << "density integral cutoff-dominated at x_lo (small-x exponent "
             << head_exp << "); ";

    MLParams pder{alpha, beta - 1.0};
    const auto integrand = [&](double x) {
        const double e = std::pow(x, beta - 2.0) *
                         special::mittag_leffler(pder, -std::pow(x, alpha));
        return e * e * special::weight_value(w, x);
    };
    int cells = 512;
    double prev = log_midpoint(integrand, win.x_lo, win.x_hi, cells);
    double cur = prev;
    for (int lvl = 1; lvl < win.levels; ++lvl) {
        cells *= 2;
        cur = log_midpoint(integrand, win.x_lo, win.x_hi, cells);
        r.quad_error = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        if (r.quad_error < 3e-7) break;
        prev = cur;
    }

    const double e1 = special::ml_kernel_value(MLParams{alpha, beta}, 1.0, 1.0);
    const ModeSum ms = mode_sum(thetas, -2.0 * gamma_exp + 2.0 * (eps0 - beta) / alpha);
    if (ms.divergent) {
        r.in_range = false;
        note << "mode sum divergent (tail fraction " << ms.growth << "); ";
    }
    r.K0 = std::sqrt(e1 * e1 + cur) * std::sqrt(ms.value);
    r.range_note = note.str();
    return r;
}

RatesResult rates(resolvent::RhoKind kind, double lambda, double gamma_holder, double p_exp,
                  double l1_rho) {
    if (!(l1_rho >= 0.0)) throw std::invalid_argument("rates: bad ||rho||_1");
    RatesResult r;
    const double log_inv = l1_rho > 0.0 ? std::log(1.0 / l1_rho)
                                        : std::numeric_limits<double>::infinity();
    switch (kind) {
        case resolvent::RhoKind::gen:
            r.chi = std::min(log_inv, lambda) / p_exp;
            r.clt_rate_lhs = lambda * gamma_holder / std::sqrt(p_exp);
            r.clt_l1_bound = std::exp(-std::sqrt(p_exp) / gamma_holder);
            break;
        case resolvent::RhoKind::b0:
            r.chi = std::min(log_inv, 2.0 * lambda) / p_exp;
            r.clt_rate_lhs = 2.0 * lambda * gamma_holder / std::sqrt(p_exp);
            r.clt_l1_bound = std::exp(-std::sqrt(p_exp) / gamma_holder);
            break;
        case resolvent::RhoKind::add:
            r.chi = std::min(log_inv, lambda);
            r.clt_rate_lhs = lambda * gamma_holder;
            r.clt_l1_bound = std::exp(-1.0 / gamma_holder);
            break;
    }
    const double cg = r.chi * gamma_holder;
    r.lln_rate = std::min(1.0, cg);
    r.lln_log_factor = std::abs(cg - 1.0) < 1e-12;
    r.clt_ok = r.clt_rate_lhs > 1.0 && l1_rho < r.clt_l1_bound;
    return r;
}

double trace_class_lln_rate(double alpha, double beta, bool b_zero, double b_lip, double K0,
                            double K1) {
    const double ind = (alpha != beta) ? 1.0 : 0.0;
    if (b_zero) return 0.5 * std::min(1.0, 0.5 + alpha - beta * ind);
    const double contraction = std::log(1.0 / (b_lip * K0 * K1));
    return 0.5 * std::min({1.0, alpha - beta * ind, contraction});
}

double frac_hjm_lln_rate(double p_exp, double l1_rho_b0, double beta_minus_alpha, double eps1) {
    const double log_term = l1_rho_b0 > 0.0 ? std::log(1.0 / l1_rho_b0) / p_exp
                                            : std::numeric_limits<double>::infinity();
    return 0.5 * std::min({1.0, log_term, (0.5 - beta_minus_alpha - eps1) / p_exp});
}

namespace {
double xi_frac(double x, double a, double b, double th) {
    const double xa = std::pow(x, a);
    const double num = std::pow(x, 2.0 * a - b) * std::sin(b * kPi) -
                       th * std::pow(x, a - b) * std::sin((a - b) * kPi);
    return num / (kPi * (th * th + 2.0 * th * std::cos(kPi * a) * xa + xa * xa));
}
}  // namespace

BoundVsIntegral cm_density_opnorm_bound(double alpha, double beta, double delta_star,
                                        double eta_star, const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("cm_density_opnorm_bound: no modes");
    const double a = alpha, b = beta;
    const double ind = (a != b) ? 1.0 : 0.0;
    const double sa2 = sq(std::sin(a * kPi));
    const double C1 = std::abs(std::sin(b * kPi)) / (kPi * sa2);
    const double C2 = std::abs(std::sin((a - b) * kPi)) / (kPi * sa2);
    const double C3 = std::abs(std::sin((a - b) * kPi)) / (2.0 * kPi * (1.0 + std::cos(a * kPi)));
    const double th1 = thetas.front();
    const double d_lo = 1.0 + 2.0 * a - 2.0 * b * ind - delta_star;
    const double d_hi = 2.0 * b - 1.0 - eta_star;
    if (d_lo <= 0.0 || d_hi <= 0.0)
        throw std::domain_error("cm_density_opnorm_bound: parameters outside the finite regime");

    BoundVsIntegral r;
    r.bound = sq(C1 / sq(th1) + C2 / th1) / d_lo + sq(C1 + C3) / d_hi;

    special::WeightParams w;  // laplace family weight
    w.family = special::WeightFamily::laplace;
    w.delta = delta_star;
    w.eta = eta_star;
    const auto f = [&](double x) {
        double sup = 0.0;
        for (double th : thetas) sup = std::max(sup, std::abs(xi_frac(x, a, b, th)));
        return sup * sup * special::weight_value(w, x);
    };
    r.integral = log_midpoint(f, 1e-8, 1e8, 8192);
    r.ok = r.integral <= r.bound;
    return r;
}

BoundVsIntegral cm_density_hs_bound(double alpha, double beta, double delta_star, double eta_star,
                                    double gamma_minus_kappa, const std::vector<double>& thetas) {
    if (thetas.empty()) throw std::invalid_argument("cm_density_hs_bound: no modes");
    const double a = alpha, b = beta;
    const double ind = (a != b) ? 1.0 : 0.0;
    const double sa2 = sq(std::sin(a * kPi));
    const double C1 = std::abs(std::sin(b * kPi)) / (kPi * sa2);
    const double C2 = std::abs(std::sin((a - b) * kPi)) / (kPi * sa2);
    const double C3 = std::abs(std::sin((a - b) * kPi)) / (2.0 * kPi * (1.0 + std::cos(a * kPi)));
    const double th1 = thetas.front();
    const double gk = gamma_minus_kappa;
    const double d_lo = 1.0 + 2.0 * a - 2.0 * b * ind - delta_star;
    const double d_mid = 1.0 + 2.0 * a - 2.0 * b * ind + eta_star;
    const double d_hi = 2.0 * b - 1.0 - eta_star;
    if (d_lo <= 0.0 || d_mid <= 0.0 || d_hi <= 0.0)
        throw std::domain_error("cm_density_hs_bound: parameters outside the finite regime");

    const double p_scale = (-2.0 * b + eta_star + 1.0) / a;
    double s_m2 = 0.0, s_scale = 0.0, s_mix = 0.0;
    for (double th : thetas) {
        s_m2 += std::pow(th, 2.0 * gk - 2.0);
        s_scale += std::pow(th, 2.0 * gk + p_scale);
        s_mix += std::pow(th, 2.0 * gk + p_scale) + std::pow(th, 2.0 * gk - 2.0);
    }

    BoundVsIntegral r;
    r.bound = sq(C1 / th1 + C2) * s_m2 / d_lo + sq(C1 / sq(th1) + C2) * s_mix / d_mid +
              sq(C1 + C3) * s_scale / d_hi;

    special::WeightParams w;
    w.family = special::WeightFamily::laplace;
    w.delta = delta_star;
    w.eta = eta_star;
    double integral = 0.0;
    for (double th : thetas) {
        const auto f = [&](double x) {
            const double v = xi_frac(x, a, b, th);
            return v * v * special::weight_value(w, x);
        };
        integral += std::pow(th, 2.0 * gk) * log_midpoint(f, 1e-8, 1e8, 8192);
    }
    r.integral = integral;
    r.ok = r.integral <= r.bound;
    return r;
}

std::string ConditionReport::to_json() const {
    nlohmann::json j;
    j["p_exp"] = p_exp;
    j["eps0"] = eps0;
    j["eps1"] = eps1;
    j["delta"] = delta;
    j["delta_star_lo"] = delta_star_lo;
    j["delta_star_hi"] = delta_star_hi;
    j["eta"] = eta;
    j["rho_exp"] = rho_exp;
    j["lambda"] = lambda;
    j["K0"] = K0;
    j["K1"] = K1;
    j["lhs_moment"] = lhs_moment;
    j["lhs_contraction"] = lhs_contraction;
    j["margin_moment"] = 1.0 - lhs_moment;
    j["margin_contraction"] = 1.0 - lhs_contraction;
    j["pass_moment"] = pass_moment;
    j["pass_contraction"] = pass_contraction;
    j["chi"] = chi;
    j["lln_rate"] = lln_rate;
    j["lln_log_factor"] = lln_log_factor;
    j["clt_ok"] = clt_ok;
    j["gamma_holder"] = gamma_holder;
    j["q_exp"] = q_exp;
    j["q_prime"] = q_prime;
    j["notes"] = notes;
    return j.dump(2);
}

}  // namespace voltlift::conditions
